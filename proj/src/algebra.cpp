#include "rhg/algebra.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rhg {

void OrthFamily::validate(double tol) const {
  if (n < 1 || m < 1 || static_cast<int>(B.size()) != m) {
    throw Error(ErrorCode::DimensionMismatch, "family size does not match (n, m)");
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < m; ++j) {
    if (B[j].rows() != n || B[j].cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "family matrix has wrong shape");
    }
    if ((B[j] * B[j].transpose() - I).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorCode::Unrealizable, "B_" + std::to_string(j + 1) + " is not orthogonal");
    }
    for (int k = j + 1; k < m; ++k) {
      const Eigen::MatrixXd s = B[j].transpose() * B[k] + B[k].transpose() * B[j];
      if (s.cwiseAbs().maxCoeff() > tol) {
        throw Error(ErrorCode::Unrealizable, "B_" + std::to_string(j + 1) + " and B_" +
                                                 std::to_string(k + 1) + " do not anticommute");
      }
    }
  }
}

FreqIndex::FreqIndex(std::vector<int> values) : k(std::move(values)) {
  bool zero = true;
  for (int v : k) zero = zero && v == 0;
  if (k.empty() || zero) throw Error(ErrorCode::ZeroLambda, "frequency index must be nonzero");
}

double FreqIndex::norm() const {
  double s = 0.0;
  for (int v : k) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

namespace {

using Vec = std::vector<double>;

Vec cd_conj(const Vec& a) {
  Vec r(a.size());
  r[0] = a[0];
  for (std::size_t i = 1; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

// Cayley-Dickson product (a1, a2)(b1, b2) = (a1 b1 - b2* a2, b2 a1 + a2 b1*).
Vec cd_mul(const Vec& a, const Vec& b) {
  const std::size_t d = a.size();
  if (d == 1) return {a[0] * b[0]};
  const std::size_t h = d / 2;
  const Vec a1(a.begin(), a.begin() + h), a2(a.begin() + h, a.end());
  const Vec b1(b.begin(), b.begin() + h), b2(b.begin() + h, b.end());
  const Vec x = cd_mul(a1, b1), y = cd_mul(cd_conj(b2), a2);
  const Vec u = cd_mul(b2, a1), v = cd_mul(a2, cd_conj(b1));
  Vec r(d);
  for (std::size_t i = 0; i < h; ++i) {
    r[i] = x[i] - y[i];
    r[h + i] = u[i] + v[i];
  }
  return r;
}

Eigen::MatrixXd left_mult(int dim, int unit) {
  Eigen::MatrixXd L(dim, dim);
  Vec e(static_cast<std::size_t>(dim), 0.0);
  e[static_cast<std::size_t>(unit)] = 1.0;
  for (int c = 0; c < dim; ++c) {
    Vec b(static_cast<std::size_t>(dim), 0.0);
    b[static_cast<std::size_t>(c)] = 1.0;
    const Vec col = cd_mul(e, b);
    for (int r = 0; r < dim; ++r) L(r, c) = col[static_cast<std::size_t>(r)];
  }
  return L;
}

}  // namespace

OrthFamily build_family(int n, int m) {
  if (n < 1 || m < 1) throw Error(ErrorCode::Unrealizable, "n and m must be positive");
  int two = 1;
  int odd = n;
  while (odd % 2 == 0 && two < 8) {
    odd /= 2;
    two *= 2;
  }
  if (m > two) {
    throw Error(ErrorCode::Unrealizable, "no anticommuting family of " + std::to_string(m) +
                                             " matrices for n = " + std::to_string(n));
  }
  OrthFamily f;
  f.n = n;
  f.m = m;
  const Eigen::MatrixXd Iodd = Eigen::MatrixXd::Identity(odd, odd);
  for (int j = 0; j < m; ++j) {
    const Eigen::MatrixXd L = left_mult(two, j);
    Eigen::MatrixXd B(n, n);
    for (int r = 0; r < two; ++r) {
      for (int c = 0; c < two; ++c) B.block(r * odd, c * odd, odd, odd) = L(r, c) * Iodd;
    }
    f.B.push_back(B);
  }
  f.validate();
  return f;
}

OrthFamily family_preset(const std::string& name) {
  if (name == "hr-1-1") return build_family(1, 1);
  if (name == "hr-2-2") return build_family(2, 2);
  if (name == "hr-4-4") return build_family(4, 4);
  if (name == "hr-8-8") return build_family(8, 8);
  throw Error(ErrorCode::ConfigInvalid, "unknown family preset " + name);
}

OrthFamily load_family(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::vector<std::vector<double>>> blocks(1);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw Error(ErrorCode::ConfigInvalid, "non-numeric entry in " + path.string());
    if (row.empty()) {
      if (!blocks.back().empty()) blocks.emplace_back();
    } else {
      blocks.back().push_back(row);
    }
  }
  if (blocks.back().empty()) blocks.pop_back();
  if (blocks.empty()) throw Error(ErrorCode::ConfigInvalid, "empty family file");
  OrthFamily f;
  f.n = static_cast<int>(blocks.front().size());
  f.m = static_cast<int>(blocks.size());
  for (const auto& b : blocks) {
    if (static_cast<int>(b.size()) != f.n) {
      throw Error(ErrorCode::DimensionMismatch, "family matrices must be square and equal size");
    }
    Eigen::MatrixXd M(f.n, f.n);
    for (int r = 0; r < f.n; ++r) {
      if (static_cast<int>(b[r].size()) != f.n) {
        throw Error(ErrorCode::DimensionMismatch, "family matrices must be square");
      }
      for (int c = 0; c < f.n; ++c) M(r, c) = b[r][c];
    }
    f.B.push_back(M);
  }
  f.validate(1e-9);
  return f;
}

std::string family_to_text(const OrthFamily& family) {
  std::ostringstream os;
  os.precision(17);
  for (int j = 0; j < family.m; ++j) {
    if (j > 0) os << '\n';
    for (int r = 0; r < family.n; ++r) {
      for (int c = 0; c < family.n; ++c) os << (c ? " " : "") << family.B[j](r, c);
      os << '\n';
    }
  }
  return os.str();
}

Eigen::MatrixXd assemble_B(const OrthFamily& family, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != family.m) {
    throw Error(ErrorCode::DimensionMismatch, "lambda length differs from m");
  }
  bool zero = true;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(family.n, family.n);
  for (int j = 0; j < family.m; ++j) {
    zero = zero && lambda[j] == 0.0;
    B += lambda[j] * family.B[j];
  }
  if (zero) throw Error(ErrorCode::ZeroLambda, "B_lambda requested for lambda = 0");
  return B;
}

Eigen::MatrixXd assemble_B(const OrthFamily& family, const FreqIndex& k) {
  const auto lam = k.as_real();
  return assemble_B(family, lam);
}

std::vector<double> bracket(std::span<const double> z, std::span<const double> zp,
                            const OrthFamily& family) {
  const auto n = static_cast<std::size_t>(family.n);
  if (z.size() != 2 * n || zp.size() != 2 * n) {
    throw Error(ErrorCode::DimensionMismatch, "bracket arguments must have length 2n");
  }
  const Eigen::Map<const Eigen::VectorXd> x(z.data(), family.n), y(z.data() + n, family.n);
  const Eigen::Map<const Eigen::VectorXd> xp(zp.data(), family.n), yp(zp.data() + n, family.n);
  std::vector<double> out(static_cast<std::size_t>(family.m));
  for (int j = 0; j < family.m; ++j) {
    out[j] = xp.dot(family.B[j] * y) - x.dot(family.B[j] * yp);
  }
  return out;
}

double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

GroupElement::GroupElement(std::vector<double> q_, std::vector<double> p_, std::vector<double> t_)
    : q(std::move(q_)), p(std::move(p_)), t(std::move(t_)) {
  if (q.size() != p.size()) throw Error(ErrorCode::DimensionMismatch, "q and p lengths differ");
  for (auto& v : t) v = wrap_angle(v);
}

GroupElement GroupElement::identity(int n, int m) {
  return GroupElement(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                      std::vector<double>(m, 0.0));
}

std::vector<double> GroupElement::z() const {
  std::vector<double> out(q);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

GroupElement multiply(const GroupElement& a, const GroupElement& b, const OrthFamily& family) {
  if (static_cast<int>(a.q.size()) != family.n || static_cast<int>(b.q.size()) != family.n ||
      static_cast<int>(a.t.size()) != family.m || static_cast<int>(b.t.size()) != family.m) {
    throw Error(ErrorCode::DimensionMismatch, "group element does not match family");
  }
  const auto za = a.z(), zb = b.z();
  const auto br = bracket(za, zb, family);
  std::vector<double> q(a.q.size()), p(a.p.size()), t(a.t.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = a.q[i] + b.q[i];
    p[i] = a.p[i] + b.p[i];
  }
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = a.t[j] + b.t[j] + 0.5 * br[j];
  return GroupElement(std::move(q), std::move(p), std::move(t));
}

GroupElement inverse(const GroupElement& a) {
  std::vector<double> q(a.q), p(a.p), t(a.t);
  for (auto& v : q) v = -v;
  for (auto& v : p) v = -v;
  for (auto& v : t) v = -v;
  return GroupElement(std::move(q), std::move(p), std::move(t));
}

GridSpec group_grid(int n, int m, double half_extent, int points, int torus_points) {
  GridSpec g;
  for (int i = 0; i < 2 * n; ++i) g.axes.push_back(AxisSpec::real_line(half_extent, points));
  for (int j = 0; j < m; ++j) g.axes.push_back(AxisSpec::torus(torus_points));
  return g;
}

namespace {

// line(t) <- line(t + delta) for a trigonometric polynomial sampled on a torus line.
void torus_line_shift(std::vector<cplx>& line, double delta) {
  const int n = static_cast<int>(line.size());
  dft_inplace(line, -1);
  for (int l = 0; l < n; ++l) {
    const int w = l < n / 2 ? l : l - n;
    cplx ph;
    if (l == n / 2) {
      ph = std::cos(0.5 * n * delta);
    } else {
      ph = cplx(std::cos(w * delta), std::sin(w * delta));
    }
    line[static_cast<std::size_t>(l)] *= ph / static_cast<double>(n);
  }
  dft_inplace(line, +1);
}

}  // namespace

Field translate(const Field& g, const GroupElement& a, const OrthFamily& family, bool spectral) {
  const auto& grid = g.grid();
  const auto n = static_cast<std::size_t>(family.n);
  const auto m = static_cast<std::size_t>(family.m);
  if (grid.rank() != 2 * n + m || grid.torus_rank() != m || a.q.size() != n || a.t.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "translate: grid does not match family");
  }
  for (std::size_t i = 0; i < 2 * n; ++i) {
    if (grid.axes[i].kind != AxisKind::RealLine) {
      throw Error(ErrorCode::AxisKindMismatch, "translate: real axes must lead");
    }
  }
  const auto za = a.z();

  // (q, p) part: out(x) = g(x - z_a).
  Field shifted;
  std::vector<int> steps(grid.rank(), 0);
  bool on_lattice = true;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const auto& ax = grid.axes[i];
    const double u = za[i] / ax.spacing();
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-9) on_lattice = false;
    steps[i] = -static_cast<int>(r);
  }
  if (on_lattice) {
    shifted = lattice_shift(g, steps);
  } else if (spectral) {
    std::vector<double> s(grid.rank(), 0.0);
    for (std::size_t i = 0; i < 2 * n; ++i) s[i] = -za[i];
    shifted = spectral_shift(g, s);
  } else {
    throw Error(ErrorCode::OffLattice, "translation (q, p) is not a grid lattice vector");
  }

  // t part: out(x) = shifted(x, t + delta(x)), delta = -t_a + [ -z_a, z_x ] / 2.
  std::size_t inner = 1;
  std::vector<std::size_t> tstride(m, 1);
  for (std::size_t j = m; j-- > 0;) {
    tstride[j] = inner;
    inner *= static_cast<std::size_t>(grid.axes[2 * n + j].points);
  }
  const std::size_t outer = grid.size() / inner;
  std::vector<double> zx(2 * n), coords(grid.rank());
  std::vector<double> neg(za);
  for (auto& v : neg) v = -v;
  auto values = shifted.values();
  for (std::size_t o = 0; o < outer; ++o) {
    shifted.coords(o * inner, coords);
    std::copy(coords.begin(), coords.begin() + static_cast<long>(2 * n), zx.begin());
    const auto br = bracket(neg, zx, family);
    for (std::size_t j = 0; j < m; ++j) {
      const double delta = -a.t[j] + 0.5 * br[j];
      if (std::abs(std::remainder(delta, kTwoPi)) < 1e-15) continue;
      const std::size_t len = static_cast<std::size_t>(grid.axes[2 * n + j].points);
      const std::size_t stride = tstride[j];
      std::vector<cplx> line(len);
      // Iterate over every torus line along axis j inside this block.
      for (std::size_t b = 0; b < inner; ++b) {
        if ((b / stride) % len != 0) continue;
        for (std::size_t l = 0; l < len; ++l) line[l] = values[o * inner + b + l * stride];
        torus_line_shift(line, delta);
        for (std::size_t l = 0; l < len; ++l) values[o * inner + b + l * stride] = line[l];
      }
    }
  }
  return shifted;
}

}  // namespace rhg
