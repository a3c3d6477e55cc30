#include "rhg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include <unsupported/Eigen/FFT>

namespace rhg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unrealizable: return "Unrealizable";
    case ErrorCode::ZeroLambda: return "ZeroLambda";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OffLattice: return "OffLattice";
    case ErrorCode::AxisKindMismatch: return "AxisKindMismatch";
    case ErrorCode::NegativeDegree: return "NegativeDegree";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::SupportOverflow: return "SupportOverflow";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::InterpolationOverflow: return "InterpolationOverflow";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::ZeroC: return "ZeroC";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// AxisSpec / GridSpec

AxisSpec AxisSpec::real_line(double half_extent, int points) {
  AxisSpec a{AxisKind::RealLine, half_extent, points};
  a.validate();
  return a;
}

AxisSpec AxisSpec::torus(int points) {
  AxisSpec a{AxisKind::Torus, kPi, points};
  a.validate();
  return a;
}

double AxisSpec::spacing() const {
  return kind == AxisKind::Torus ? kTwoPi / points : 2.0 * half_extent / points;
}

double AxisSpec::node(int j) const {
  return kind == AxisKind::Torus ? kTwoPi * j / points : -half_extent + j * spacing();
}

AxisSpec AxisSpec::dual() const {
  if (kind != AxisKind::RealLine) {
    throw Error(ErrorCode::AxisKindMismatch, "torus axis has no continuous dual");
  }
  return AxisSpec{AxisKind::RealLine, points * kPi / (2.0 * half_extent), points};
}

int AxisSpec::lattice_index(double x, double tol) const {
  const double u = (x - node(0)) / spacing();
  const double r = std::round(u);
  if (std::abs(u - r) > tol) return -1;
  return static_cast<int>(r);
}

void AxisSpec::validate() const {
  if (points < 4 || points % 2 != 0) {
    throw Error(ErrorCode::ConfigInvalid, "axis point count must be even and >= 4");
  }
  if (kind == AxisKind::RealLine && !(half_extent > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "axis half extent must be positive");
  }
}

bool AxisSpec::operator==(const AxisSpec& o) const {
  if (kind != o.kind || points != o.points) return false;
  if (kind == AxisKind::Torus) return true;
  return std::abs(half_extent - o.half_extent) <= 1e-12 * std::max(1.0, half_extent);
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (const auto& a : axes) s *= static_cast<std::size_t>(a.points);
  return s;
}

std::vector<std::size_t> GridSpec::strides() const {
  std::vector<std::size_t> s(axes.size(), 1);
  for (std::size_t i = axes.size(); i-- > 1;) {
    s[i - 1] = s[i] * static_cast<std::size_t>(axes[i].points);
  }
  return s;
}

std::size_t GridSpec::torus_rank() const {
  return static_cast<std::size_t>(std::count_if(
      axes.begin(), axes.end(), [](const AxisSpec& a) { return a.kind == AxisKind::Torus; }));
}

double GridSpec::cell_weight() const {
  double w = 1.0;
  for (const auto& a : axes) w *= a.weight();
  return w;
}

void GridSpec::validate() const {
  for (const auto& a : axes) a.validate();
}

bool GridSpec::operator==(const GridSpec& other) const { return axes == other.axes; }

GridSpec GridSpec::real(int dims, double half_extent, int points) {
  return GridSpec(std::vector<AxisSpec>(static_cast<std::size_t>(dims),
                                        AxisSpec::real_line(half_extent, points)));
}

GridSpec strip_torus(const GridSpec& grid) {
  GridSpec out;
  for (const auto& a : grid.axes) {
    if (a.kind == AxisKind::RealLine) out.axes.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Field

Field::Field(GridSpec grid) : grid_(std::move(grid)), values_(grid_.size()) {}

Field::Field(GridSpec grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "value count does not match grid");
  }
}

Field Field::sample(const GridSpec& grid,
                    const std::function<cplx(std::span<const double>)>& fn) {
  Field f(grid);
  std::vector<double> x(grid.rank());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords(i, x);
    f.values_[i] = fn(x);
  }
  return f;
}

void Field::indices(std::size_t i, std::span<int> out) const {
  for (std::size_t a = grid_.rank(); a-- > 0;) {
    const auto n = static_cast<std::size_t>(grid_.axes[a].points);
    out[a] = static_cast<int>(i % n);
    i /= n;
  }
}

void Field::coords(std::size_t i, std::span<double> out) const {
  for (std::size_t a = grid_.rank(); a-- > 0;) {
    const auto n = static_cast<std::size_t>(grid_.axes[a].points);
    out[a] = grid_.axes[a].node(static_cast<int>(i % n));
    i /= n;
  }
}

std::size_t Field::flat(std::span<const int> idx) const {
  std::size_t i = 0;
  for (std::size_t a = 0; a < grid_.rank(); ++a) {
    i = i * static_cast<std::size_t>(grid_.axes[a].points) + static_cast<std::size_t>(idx[a]);
  }
  return i;
}

Field& Field::operator+=(const Field& other) {
  if (!(grid_ == other.grid_)) throw Error(ErrorCode::GridMismatch, "field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (!(grid_ == other.grid_)) throw Error(ErrorCode::GridMismatch, "field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

namespace {

double measure_weight(const GridSpec& grid, Measure m) {
  double w = grid.cell_weight();
  if (m == Measure::Mu) w /= std::pow(kTwoPi, static_cast<double>(grid.torus_rank()));
  return w;
}

// Pairwise summation keeps reductions independent of evaluation order.
template <typename T, typename F>
T pairwise_sum(std::size_t lo, std::size_t hi, const F& term) {
  if (hi - lo <= 64) {
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum<T>(lo, mid, term) + pairwise_sum<T>(mid, hi, term);
}

}  // namespace

cplx integrate(const Field& f, Measure measure) {
  const auto v = f.values();
  return measure_weight(f.grid(), measure) *
         pairwise_sum<cplx>(0, v.size(), [&](std::size_t i) { return v[i]; });
}

cplx inner(const Field& f, const Field& g, Measure measure) {
  if (!(f.grid() == g.grid())) throw Error(ErrorCode::GridMismatch, "inner product");
  const auto a = f.values();
  const auto b = g.values();
  return measure_weight(f.grid(), measure) *
         pairwise_sum<cplx>(0, a.size(), [&](std::size_t i) { return a[i] * std::conj(b[i]); });
}

double norm(const Field& f, Measure measure) {
  const auto a = f.values();
  const double s =
      pairwise_sum<double>(0, a.size(), [&](std::size_t i) { return std::norm(a[i]); });
  return std::sqrt(measure_weight(f.grid(), measure) * s);
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::GridMismatch, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double rel_l2(const Field& a, const Field& b, Measure measure) {
  const double d = norm(a - b, measure);
  const double r = norm(b, measure);
  return r > 0.0 ? d / r : d;
}

// ---------------------------------------------------------------------------
// Fourier transforms

void dft_inplace(std::vector<cplx>& data, int sign) {
  static thread_local Eigen::FFT<double> fft;
  std::vector<cplx> out(data.size());
  if (sign < 0) {
    fft.fwd(out, data);
  } else {
    for (auto& v : data) v = std::conj(v);
    fft.fwd(out, data);
    for (auto& v : out) v = std::conj(v);
  }
  data.swap(out);
}

namespace {

// Visits every 1-D line of the grid along `axis`.
template <typename F>
void for_each_line(const GridSpec& grid, std::size_t axis, const F& fn) {
  const auto strides = grid.strides();
  const std::size_t n = static_cast<std::size_t>(grid.axes[axis].points);
  const std::size_t stride = strides[axis];
  const std::size_t total = grid.size();
  const std::size_t outer = total / (n * stride);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < stride; ++s) {
      fn(o * n * stride + s, stride, n);
    }
  }
}

void transform_axis(Field& f, std::size_t axis, int sign) {
  const AxisSpec ax = f.grid().axes[axis];
  if (ax.kind != AxisKind::RealLine) {
    throw Error(ErrorCode::AxisKindMismatch, "Fourier transform requested on a torus axis");
  }
  const int n = ax.points;
  const AxisSpec out_axis = ax.dual();
  const double scale = ax.spacing() / std::sqrt(kTwoPi);
  const double half_sign = (n / 2) % 2 == 0 ? 1.0 : -1.0;
  std::vector<cplx> line(static_cast<std::size_t>(n));
  auto values = f.values();
  for_each_line(f.grid(), axis, [&](std::size_t base, std::size_t stride, std::size_t len) {
    for (std::size_t j = 0; j < len; ++j) {
      const double alt = (j % 2 == 0) ? 1.0 : -1.0;
      line[j] = alt * values[base + j * stride];
    }
    dft_inplace(line, sign);
    for (std::size_t l = 0; l < len; ++l) {
      const double alt = ((l % 2 == 0) ? 1.0 : -1.0) * half_sign;
      values[base + l * stride] = scale * alt * line[l];
    }
  });
  GridSpec g = f.grid();
  g.axes[axis] = out_axis;
  std::vector<cplx> v(values.begin(), values.end());
  f = Field(std::move(g), std::move(v));
}

Field transform(const Field& f, const std::vector<bool>& axes, int sign) {
  if (axes.size() != f.grid().rank()) {
    throw Error(ErrorCode::DimensionMismatch, "axis mask length");
  }
  Field out = f;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (axes[a]) transform_axis(out, a, sign);
  }
  return out;
}

}  // namespace

Field fourier_forward(const Field& f, const std::vector<bool>& axes) { return transform(f, axes, -1); }
Field fourier_inverse(const Field& f, const std::vector<bool>& axes) { return transform(f, axes, +1); }
Field fourier_forward(const Field& f) {
  return fourier_forward(f, std::vector<bool>(f.grid().rank(), true));
}
Field fourier_inverse(const Field& f) {
  return fourier_inverse(f, std::vector<bool>(f.grid().rank(), true));
}

namespace {

// Contracts a field against per-axis weight vectors: sum_j prod_a w_a[j_a] f_j.
cplx contract(const Field& f, const std::vector<std::vector<cplx>>& w) {
  const auto& grid = f.grid();
  const std::size_t rank = grid.rank();
  // Fold axes from the last one inward.
  std::vector<cplx> cur(f.values().begin(), f.values().end());
  for (std::size_t a = rank; a-- > 0;) {
    const std::size_t n = static_cast<std::size_t>(grid.axes[a].points);
    const std::size_t outer = cur.size() / n;
    std::vector<cplx> next(outer);
    for (std::size_t o = 0; o < outer; ++o) {
      cplx s{};
      const cplx* row = cur.data() + o * n;
      for (std::size_t j = 0; j < n; ++j) s += w[a][j] * row[j];
      next[o] = s;
    }
    cur.swap(next);
  }
  return cur[0];
}

std::vector<cplx> exp_dft(const Field& f, std::span<const double> pts, double sign) {
  const auto& grid = f.grid();
  const std::size_t rank = grid.rank();
  for (const auto& a : grid.axes) {
    if (a.kind != AxisKind::RealLine) {
      throw Error(ErrorCode::AxisKindMismatch, "direct transform on torus axis");
    }
  }
  if (pts.size() % rank != 0) throw Error(ErrorCode::DimensionMismatch, "point array");
  const std::size_t npts = pts.size() / rank;
  const double scale = grid.cell_weight() / std::pow(kTwoPi, 0.5 * static_cast<double>(rank));
  std::vector<std::vector<cplx>> w(rank);
  std::vector<cplx> out(npts);
  for (std::size_t p = 0; p < npts; ++p) {
    for (std::size_t a = 0; a < rank; ++a) {
      const auto& ax = grid.axes[a];
      w[a].resize(static_cast<std::size_t>(ax.points));
      const double xi = pts[p * rank + a];
      for (int j = 0; j < ax.points; ++j) {
        const double ph = sign * ax.node(j) * xi;
        w[a][static_cast<std::size_t>(j)] = cplx(std::cos(ph), std::sin(ph));
      }
    }
    out[p] = scale * contract(f, w);
  }
  return out;
}

// Periodic band-limited interpolation weight for offset theta = (x - x_j) pi / L.
double periodic_sinc(int n, double theta) {
  const double s = std::sin(0.5 * theta);
  if (std::abs(s) < 1e-14) {
    // theta near 0 mod 2 pi
    const double c = std::cos(0.5 * n * theta);
    return (n - 1 + c) / n * (std::cos(0.5 * theta) > 0 ? 1.0 : ((n % 2 == 0) ? 1.0 : -1.0));
  }
  return (std::sin(0.5 * (n - 1) * theta) / s + std::cos(0.5 * n * theta)) / n;
}

}  // namespace

std::vector<cplx> fourier_forward_at(const Field& f, std::span<const double> freqs) {
  return exp_dft(f, freqs, -1.0);
}

std::vector<cplx> fourier_inverse_at(const Field& f_hat, std::span<const double> points) {
  return exp_dft(f_hat, points, +1.0);
}

std::vector<cplx> interpolate(const Field& f, std::span<const double> points, double edge_tol) {
  const auto& grid = f.grid();
  const std::size_t rank = grid.rank();
  for (const auto& a : grid.axes) {
    if (a.kind != AxisKind::RealLine) {
      throw Error(ErrorCode::AxisKindMismatch, "interpolation on torus axis");
    }
  }
  if (points.size() % rank != 0) throw Error(ErrorCode::DimensionMismatch, "point array");

  // Boundary magnitude decides whether out-of-box points may be zeroed.
  double edge = 0.0;
  {
    std::vector<int> idx(rank);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f.indices(i, idx);
      for (std::size_t a = 0; a < rank; ++a) {
        if (idx[a] == 0 || idx[a] == grid.axes[a].points - 1) {
          edge = std::max(edge, std::abs(f[i]));
          break;
        }
      }
    }
  }
  const double peak = max_abs(f);
  const bool edge_ok = edge <= edge_tol * std::max(peak, 1e-300);

  const std::size_t npts = points.size() / rank;
  std::vector<std::vector<cplx>> w(rank);
  std::vector<cplx> out(npts);
  for (std::size_t p = 0; p < npts; ++p) {
    bool inside = true;
    for (std::size_t a = 0; a < rank; ++a) {
      const auto& ax = grid.axes[a];
      const double x = points[p * rank + a];
      if (x < -ax.half_extent - 1e-12 || x > ax.half_extent - ax.spacing() + 1e-12) {
        inside = false;
      }
    }
    if (!inside) {
      if (!edge_ok) {
        throw Error(ErrorCode::InterpolationOverflow,
                    "query point outside grid while field is not negligible at the boundary");
      }
      out[p] = 0.0;
      continue;
    }
    for (std::size_t a = 0; a < rank; ++a) {
      const auto& ax = grid.axes[a];
      w[a].resize(static_cast<std::size_t>(ax.points));
      const double x = points[p * rank + a];
      for (int j = 0; j < ax.points; ++j) {
        const double theta = (x - ax.node(j)) * kPi / ax.half_extent;
        w[a][static_cast<std::size_t>(j)] = periodic_sinc(ax.points, theta);
      }
    }
    out[p] = contract(f, w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Torus coefficients

namespace {

struct TorusLayout {
  std::size_t outer = 1;   // product of real-axis sizes
  std::size_t inner = 1;   // product of torus-axis sizes
  std::vector<AxisSpec> torus_axes;
};

TorusLayout torus_layout(const GridSpec& grid) {
  TorusLayout t;
  bool seen_torus = false;
  for (const auto& a : grid.axes) {
    if (a.kind == AxisKind::Torus) {
      seen_torus = true;
      t.inner *= static_cast<std::size_t>(a.points);
      t.torus_axes.push_back(a);
    } else {
      if (seen_torus) {
        throw Error(ErrorCode::AxisKindMismatch, "torus axes must trail the real axes");
      }
      t.outer *= static_cast<std::size_t>(a.points);
    }
  }
  return t;
}

}  // namespace

Field torus_coeff(const Field& f, std::span<const int> k) {
  const TorusLayout lay = torus_layout(f.grid());
  if (lay.torus_axes.empty()) throw Error(ErrorCode::AxisKindMismatch, "no torus axes");
  if (k.size() != lay.torus_axes.size()) throw Error(ErrorCode::DimensionMismatch, "k length");

  // Character e^{i k.t} on the torus subgrid.
  std::vector<cplx> chi(lay.inner);
  {
    const std::size_t m = lay.torus_axes.size();
    std::vector<int> idx(m, 0);
    for (std::size_t i = 0; i < lay.inner; ++i) {
      std::size_t r = i;
      double ph = 0.0;
      for (std::size_t a = m; a-- > 0;) {
        const auto n = static_cast<std::size_t>(lay.torus_axes[a].points);
        idx[a] = static_cast<int>(r % n);
        r /= n;
        ph += k[a] * lay.torus_axes[a].node(idx[a]);
      }
      chi[i] = cplx(std::cos(ph), std::sin(ph)) / static_cast<double>(lay.inner);
    }
  }
  Field out(strip_torus(f.grid()));
  const auto v = f.values();
  for (std::size_t o = 0; o < lay.outer; ++o) {
    cplx s{};
    for (std::size_t i = 0; i < lay.inner; ++i) s += chi[i] * v[o * lay.inner + i];
    out[o] = s;
  }
  return out;
}

std::vector<std::vector<int>> torus_support(const Field& f, double tol) {
  const TorusLayout lay = torus_layout(f.grid());
  const std::size_t m = lay.torus_axes.size();
  const double total = norm(f, Measure::Mu);
  std::vector<std::vector<int>> out;
  if (total == 0.0) return out;
  // Enumerate k in the resolvable band (-N/2, N/2) on every torus axis.
  std::vector<int> k(m);
  std::size_t count = 1;
  for (const auto& a : lay.torus_axes) count *= static_cast<std::size_t>(a.points - 1);
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t r = c;
    bool zero = true;
    for (std::size_t a = m; a-- > 0;) {
      const int span = lay.torus_axes[a].points - 1;
      k[a] = static_cast<int>(r % static_cast<std::size_t>(span)) - (lay.torus_axes[a].points / 2 - 1);
      r /= static_cast<std::size_t>(span);
      zero = zero && k[a] == 0;
    }
    if (zero) continue;
    if (norm(torus_coeff(f, k)) > tol * total) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shifts

Field lattice_shift(const Field& f, std::span<const int> steps) {
  const auto& grid = f.grid();
  const std::size_t rank = grid.rank();
  if (steps.size() != rank) throw Error(ErrorCode::DimensionMismatch, "shift length");
  Field out(grid);
  std::vector<int> idx(rank);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.indices(i, idx);
    bool inside = true;
    for (std::size_t a = 0; a < rank; ++a) {
      idx[a] += steps[a];
      if (idx[a] < 0 || idx[a] >= grid.axes[a].points) inside = false;
    }
    if (inside) out[i] = f[f.flat(idx)];
  }
  return out;
}

Field spectral_shift(const Field& f, std::span<const double> shift) {
  const auto& grid = f.grid();
  if (shift.size() != grid.rank()) throw Error(ErrorCode::DimensionMismatch, "shift length");
  Field out = f;
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    if (shift[a] == 0.0) continue;
    const auto& ax = grid.axes[a];
    if (ax.kind != AxisKind::RealLine) {
      throw Error(ErrorCode::AxisKindMismatch, "spectral shift on torus axis");
    }
    const int n = ax.points;
    std::vector<cplx> line(static_cast<std::size_t>(n));
    auto values = out.values();
    for_each_line(grid, a, [&](std::size_t base, std::size_t stride, std::size_t len) {
      for (std::size_t j = 0; j < len; ++j) line[j] = values[base + j * stride];
      dft_inplace(line, -1);
      for (std::size_t l = 0; l < len; ++l) {
        const int freq = static_cast<int>(l) < n / 2 ? static_cast<int>(l) : static_cast<int>(l) - n;
        const double omega = kTwoPi * freq / (n * ax.spacing());
        line[l] *= cplx(std::cos(omega * shift[a]), std::sin(omega * shift[a])) / static_cast<double>(n);
      }
      dft_inplace(line, +1);
      for (std::size_t j = 0; j < len; ++j) values[base + j * stride] = line[j];
    });
  }
  return out;
}

double boundary_ratio(const Field& f, int width) {
  const auto& grid = f.grid();
  const std::size_t rank = grid.rank();
  std::vector<int> idx(rank);
  double edge = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::abs(f[i]);
    peak = std::max(peak, v);
    f.indices(i, idx);
    for (std::size_t a = 0; a < rank; ++a) {
      if (grid.axes[a].kind == AxisKind::RealLine &&
          (idx[a] < width || idx[a] >= grid.axes[a].points - width)) {
        edge = std::max(edge, v);
        break;
      }
    }
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

// ---------------------------------------------------------------------------
// Serialization

std::string grid_to_json(const GridSpec& grid) {
  nlohmann::json j;
  j["schema"] = 1;
  j["axes"] = nlohmann::json::array();
  for (const auto& a : grid.axes) {
    nlohmann::json ax;
    ax["kind"] = a.kind == AxisKind::Torus ? "torus" : "real-line";
    if (a.kind == AxisKind::RealLine) ax["half_extent"] = a.half_extent;
    ax["points"] = a.points;
    j["axes"].push_back(ax);
  }
  return j.dump(2);
}

GridSpec grid_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GridSpec g;
    for (const auto& ax : j.at("axes")) {
      const std::string kind = ax.at("kind");
      const int points = ax.at("points");
      if (kind == "torus") {
        g.axes.push_back(AxisSpec::torus(points));
      } else if (kind == "real-line") {
        g.axes.push_back(AxisSpec::real_line(ax.at("half_extent").get<double>(), points));
      } else {
        throw Error(ErrorCode::ConfigInvalid, "unknown axis kind " + kind);
      }
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

namespace {

void write_le_double(std::ostream& os, double v) {
  unsigned char b[8];
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

double read_le_double(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void dump_field(const Field& f, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  for (const auto& v : f.values()) {
    write_le_double(os, v.real());
    write_le_double(os, v.imag());
  }
  std::ofstream js(path.string() + ".json");
  if (!js) throw Error(ErrorCode::IoFailure, "cannot open sidecar for " + path.string());
  js << grid_to_json(f.grid()) << '\n';
  if (!os || !js) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

Field load_field(const std::filesystem::path& path) {
  std::ifstream js(path.string() + ".json");
  if (!js) throw Error(ErrorCode::IoFailure, "missing sidecar for " + path.string());
  std::stringstream ss;
  ss << js.rdbuf();
  Field f(grid_from_json(ss.str()));
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  for (auto& v : f.values()) {
    const double re = read_le_double(is);
    const double im = read_le_double(is);
    v = cplx(re, im);
  }
  if (!is) throw Error(ErrorCode::IoFailure, "truncated field file " + path.string());
  return f;
}

void export_csv(const Field& f, const std::filesystem::path& path) {
  const std::size_t rank = f.grid().rank();
  if (rank < 1 || rank > 2) throw Error(ErrorCode::DimensionMismatch, "CSV export needs rank 1 or 2");
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  os << (rank == 1 ? "x0,re,im\n" : "x0,x1,re,im\n");
  os.precision(17);
  std::vector<double> x(rank);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords(i, x);
    for (double c : x) os << c << ',';
    os << f[i].real() << ',' << f[i].imag() << '\n';
  }
  if (!os) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace rhg
