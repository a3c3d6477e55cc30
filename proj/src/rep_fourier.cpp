#include "rhg/rep_fourier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rhg/specials.hpp"

namespace rhg {

namespace {

double two_pi_pow(double e) { return std::pow(kTwoPi, e); }

GridSpec qgrid_of(const GridSpec& qp) {
  const std::size_t n = qp.rank() / 2;
  return GridSpec(std::vector<AxisSpec>(qp.axes.begin(), qp.axes.begin() + static_cast<long>(n)));
}

void require_phase_grid(const GridSpec& qp, const GridSpec& xgrid) {
  if (qp.rank() != 2 * xgrid.rank() || !(position_grid(qp) == xgrid)) {
    throw Error(ErrorCode::GridMismatch, "p axes of the phase grid must equal the x grid");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// KernelOp

KernelOp::KernelOp(GridSpec grid) : xgrid(std::move(grid)) {
  const auto s = static_cast<long>(xgrid.size());
  values = Eigen::MatrixXcd::Zero(s, s);
}

KernelOp::KernelOp(GridSpec grid, Eigen::MatrixXcd v) : xgrid(std::move(grid)), values(std::move(v)) {
  const auto s = static_cast<long>(xgrid.size());
  if (values.rows() != s || values.cols() != s) {
    throw Error(ErrorCode::DimensionMismatch, "kernel matrix does not match grid");
  }
}

Field KernelOp::apply(const Field& phi) const {
  if (!(phi.grid() == xgrid)) throw Error(ErrorCode::GridMismatch, "kernel apply");
  const Eigen::Map<const Eigen::VectorXcd> v(phi.values().data(), static_cast<long>(phi.size()));
  const Eigen::VectorXcd r = weight() * (values * v);
  return Field(xgrid, std::vector<cplx>(r.data(), r.data() + r.size()));
}

double KernelOp::hs_norm() const { return weight() * values.norm(); }

Field KernelOp::as_field() const {
  GridSpec g = xgrid;
  g.axes.insert(g.axes.end(), xgrid.axes.begin(), xgrid.axes.end());
  std::vector<cplx> v(static_cast<std::size_t>(values.size()));
  for (long i = 0; i < values.rows(); ++i) {
    for (long j = 0; j < values.cols(); ++j) v[static_cast<std::size_t>(i * values.cols() + j)] = values(i, j);
  }
  return Field(std::move(g), std::move(v));
}

KernelOp KernelOp::from_field(const Field& f) {
  const auto& g = f.grid();
  if (g.rank() % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "kernel field rank must be even");
  const std::size_t n = g.rank() / 2;
  GridSpec x(std::vector<AxisSpec>(g.axes.begin(), g.axes.begin() + static_cast<long>(n)));
  GridSpec y(std::vector<AxisSpec>(g.axes.begin() + static_cast<long>(n), g.axes.end()));
  if (!(x == y)) throw Error(ErrorCode::GridMismatch, "kernel field must be over x and y of one grid");
  KernelOp op(x);
  const long s = static_cast<long>(x.size());
  for (long i = 0; i < s; ++i) {
    for (long j = 0; j < s; ++j) op.values(i, j) = f[static_cast<std::size_t>(i * s + j)];
  }
  return op;
}

double hs_norm(const KernelOp& op) { return op.hs_norm(); }

// ---------------------------------------------------------------------------
// Representation

Field apply_rep(const FreqIndex& k, const GroupElement& a, const Field& phi,
                const OrthFamily& family) {
  const auto& grid = phi.grid();
  const auto n = static_cast<std::size_t>(family.n);
  if (grid.rank() != n || a.q.size() != n || k.size() != static_cast<std::size_t>(family.m) ||
      a.t.size() != static_cast<std::size_t>(family.m)) {
    throw Error(ErrorCode::DimensionMismatch, "apply_rep: dimensions do not match family");
  }
  std::vector<int> steps(n);
  bool lattice = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = a.p[i] / grid.axes[i].spacing();
    if (std::abs(u - std::round(u)) > 1e-9) lattice = false;
    steps[i] = static_cast<int>(std::round(u));
  }
  Field out = lattice ? lattice_shift(phi, steps) : spectral_shift(phi, a.p);
  const double before = norm(phi);
  if (before > 0.0) {
    const double lost = std::abs(before - norm(out)) / before;
    if (lost > 1e-9 || boundary_ratio(out) > 1e-6) {
      throw Error(ErrorCode::SupportOverflow, "shifted state reaches the grid boundary");
    }
  }
  const Eigen::MatrixXd B = assemble_B(family, k);
  const Eigen::Map<const Eigen::VectorXd> q(a.q.data(), static_cast<long>(n));
  const Eigen::VectorXd bq = B.transpose() * q;  // q.B v = (B^t q).v
  double tphase = 0.0;
  for (std::size_t j = 0; j < a.t.size(); ++j) tphase += k.k[j] * a.t[j];
  std::vector<double> x(n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.coords(i, x);
    double ph = tphase;
    for (std::size_t c = 0; c < n; ++c) ph += bq[static_cast<long>(c)] * (x[c] + 0.5 * a.p[c]);
    out[i] *= cplx(std::cos(ph), std::sin(ph));
  }
  return out;
}

cplx matrix_element(const FreqIndex& k, const GroupElement& a, const Field& phi, const Field& psi,
                    const OrthFamily& family) {
  return inner(phi, apply_rep(k, a, psi, family));
}

GridSpec phase_grid(const GridSpec& xgrid, double scale) {
  GridSpec g;
  for (const auto& a : xgrid.axes) {
    const auto d = a.dual();
    g.axes.push_back(AxisSpec::real_line(d.half_extent / scale, d.points));
  }
  g.axes.insert(g.axes.end(), xgrid.axes.begin(), xgrid.axes.end());
  return g;
}

GridSpec group_grid_for(const GridSpec& xgrid, int m, int torus_points, double scale) {
  GridSpec g = phase_grid(xgrid, scale);
  for (int j = 0; j < m; ++j) g.axes.push_back(AxisSpec::torus(torus_points));
  return g;
}

AdmissibilityResult admissibility_constant(const FreqIndex& k, const Field& phi,
                                           const OrthFamily& family, int torus_points) {
  const auto n = static_cast<double>(family.n);
  const double kn = k.norm();
  const GridSpec qp = phase_grid(phi.grid(), kn);
  const Eigen::MatrixXd B = assemble_B(family, k);
  // <phi, pi_k(q,p,t) phi> = e^{-i k.t} conj((2 pi)^{n/2} V_k(phi, phi)(q, p)).
  const Field V = fourier_wigner_general(phi, phi, B.transpose(), qp);
  Field integrand(qp);
  for (std::size_t i = 0; i < V.size(); ++i) integrand[i] = two_pi_pow(n) * std::norm(V[i]);

  // Torus integral of the t-independent modulus, by quadrature on the m-torus.
  const GridSpec torus(std::vector<AxisSpec>(static_cast<std::size_t>(family.m), AxisSpec::torus(torus_points)));
  const Field ones = Field::sample(torus, [](std::span<const double>) { return cplx(1.0); });
  const double torus_volume = integrate(ones).real();

  AdmissibilityResult r;
  r.integral = torus_volume * integrate(integrand).real();
  double edge = 0.0;
  {
    std::vector<int> idx(qp.rank());
    for (std::size_t i = 0; i < integrand.size(); ++i) {
      integrand.indices(i, idx);
      for (std::size_t a = 0; a < qp.rank(); ++a) {
        if (idx[a] < 2 || idx[a] >= qp.axes[a].points - 2) {
          edge += integrand[i].real();
          break;
        }
      }
    }
    edge *= qp.cell_weight() * torus_volume;
  }
  r.tail = r.integral > 0.0 ? edge / r.integral : 0.0;
  if (r.tail > 1e-8) {
    throw Error(ErrorCode::TruncationTooSmall, "matrix coefficient is not negligible at the domain edge");
  }
  const double nphi = norm(phi);
  r.constant = r.integral / std::pow(nphi, 4);
  r.expected = std::abs(B.determinant()) > 0.0
                   ? two_pi_pow(family.m + n) / std::abs(B.determinant())
                   : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Group Fourier transform

KernelOp gft(const Field& f, const FreqIndex& k, const OrthFamily& family) {
  return gft_coeff(torus_coeff(f, k.k), k, family);
}

KernelOp gft_coeff(const Field& fk, const FreqIndex& k, const OrthFamily& family) {
  const GridSpec& qp = fk.grid();
  const auto n = static_cast<std::size_t>(family.n);
  if (qp.rank() != 2 * n || qp.torus_rank() != 0) {
    throw Error(ErrorCode::DimensionMismatch, "gft needs f^k on a (q, p) grid");
  }
  const GridSpec xg = position_grid(qp);
  const GridSpec qg = qgrid_of(qp);
  const Eigen::MatrixXd B = assemble_B(family, k);
  KernelOp op(xg);

  // Edge of the q-spectrum decides whether out-of-band evaluations may be zeroed.
  std::vector<bool> qmask(2 * n, false);
  for (std::size_t a = 0; a < n; ++a) qmask[a] = true;
  const Field spec = fourier_inverse(fk, qmask);
  double edge = 0.0, peak = 0.0;
  {
    std::vector<int> idx(2 * n);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double v = std::abs(spec[i]);
      peak = std::max(peak, v);
      spec.indices(i, idx);
      for (std::size_t a = 0; a < n; ++a) {
        if (idx[a] < 2 || idx[a] >= qp.axes[a].points - 2) edge = std::max(edge, v);
      }
    }
  }
  const bool edge_ok = edge <= 1e-10 * std::max(peak, 1e-300);
  std::vector<double> band(n);
  for (std::size_t a = 0; a < n; ++a) band[a] = qp.axes[a].dual().half_extent;

  const std::size_t nx = xg.size();
  const std::size_t np = nx;
  const std::size_t nq = qg.size();
  const Field xnodes(xg);
  std::vector<std::vector<int>> xidx(nx, std::vector<int>(n));
  std::vector<std::vector<double>> xc(nx, std::vector<double>(n));
  for (std::size_t i = 0; i < nx; ++i) {
    xnodes.indices(i, xidx[i]);
    xnodes.coords(i, xc[i]);
  }

  // Group the (x, y) pairs by the difference index so each q-slice is reused.
  const auto xstr = xg.strides();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_d(np);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      std::size_t flat = 0;
      bool inside = true;
      for (std::size_t a = 0; a < n; ++a) {
        const int s = xidx[j][a] - xidx[i][a] + xg.axes[a].points / 2;
        if (s < 0 || s >= xg.axes[a].points) {
          inside = false;
          break;
        }
        flat += static_cast<std::size_t>(s) * xstr[a];
      }
      if (inside) by_d[flat].emplace_back(i, j);
    }
  }

  const double scale = two_pi_pow(0.5 * static_cast<double>(n));
  Field slice(qg);
  std::vector<double> pts;
  std::vector<std::pair<std::size_t, std::size_t>> keep;
  Eigen::VectorXd u(static_cast<long>(n));
  for (std::size_t d = 0; d < np; ++d) {
    if (by_d[d].empty()) continue;
    bool nonzero = false;
    for (std::size_t iq = 0; iq < nq; ++iq) {
      slice[iq] = fk[iq * np + d];
      nonzero = nonzero || slice[iq] != cplx(0.0);
    }
    if (!nonzero) continue;
    pts.clear();
    keep.clear();
    for (const auto& [i, j] : by_d[d]) {
      for (std::size_t a = 0; a < n; ++a) u[static_cast<long>(a)] = 0.5 * (xc[i][a] + xc[j][a]);
      const Eigen::VectorXd xi = B * u;
      bool in_band = true;
      for (std::size_t a = 0; a < n; ++a) {
        const double v = xi[static_cast<long>(a)];
        if (v < -band[a] - 1e-12 || v > band[a] + 1e-12) in_band = false;
      }
      if (!in_band) {
        if (!edge_ok) {
          throw Error(ErrorCode::InterpolationOverflow,
                      "B_k (x + y) / 2 leaves the dual grid while the spectrum is not negligible there");
        }
        continue;
      }
      keep.emplace_back(i, j);
      for (std::size_t a = 0; a < n; ++a) pts.push_back(xi[static_cast<long>(a)]);
    }
    if (keep.empty()) continue;
    const auto vals = fourier_inverse_at(slice, pts);
    for (std::size_t r = 0; r < keep.size(); ++r) {
      op.values(static_cast<long>(keep[r].first), static_cast<long>(keep[r].second)) = scale * vals[r];
    }
  }
  return op;
}

Field trace_table(const KernelOp& op, const FreqIndex& k, const GridSpec& qp,
                  const OrthFamily& family) {
  const GridSpec& xg = op.xgrid;
  const auto n = static_cast<std::size_t>(family.n);
  require_phase_grid(qp, xg);
  const GridSpec qg = qgrid_of(qp);
  const Eigen::MatrixXd Bt = assemble_B(family, k).transpose();
  const std::size_t nx = xg.size(), nq = qg.size();

  std::vector<double> bq(nq * n);
  {
    const Field qnodes(qg);
    std::vector<double> q(n);
    for (std::size_t iq = 0; iq < nq; ++iq) {
      qnodes.coords(iq, q);
      const Eigen::VectorXd v = Bt * Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<long>(n));
      for (std::size_t a = 0; a < n; ++a) bq[iq * n + a] = v[static_cast<long>(a)];
    }
  }
  const double scale = two_pi_pow(0.5 * static_cast<double>(n));
  Field out(qp);
  Field v(xg);
  const Field xnodes(xg);
  std::vector<int> pi(n), xi(n), src(n);
  std::vector<double> p(n);
  for (std::size_t ip = 0; ip < nx; ++ip) {
    xnodes.indices(ip, pi);
    xnodes.coords(ip, p);
    // v(x) = N(x - p, x), with p = (pi - N/2) h on the lattice.
    for (std::size_t ix = 0; ix < nx; ++ix) {
      xnodes.indices(ix, xi);
      bool inside = true;
      for (std::size_t a = 0; a < n; ++a) {
        src[a] = xi[a] - (pi[a] - xg.axes[a].points / 2);
        if (src[a] < 0 || src[a] >= xg.axes[a].points) inside = false;
      }
      v[ix] = inside ? op.values(static_cast<long>(xnodes.flat(src)), static_cast<long>(ix)) : cplx(0.0);
    }
    const auto ft = fourier_forward_at(v, bq);
    for (std::size_t iq = 0; iq < nq; ++iq) {
      double ph = 0.0;
      for (std::size_t a = 0; a < n; ++a) ph += 0.5 * bq[iq * n + a] * p[a];
      out[iq * nx + ip] = scale * ft[iq] * cplx(std::cos(ph), std::sin(ph));
    }
  }
  return out;
}

cplx trace_rep(const KernelOp& op, const FreqIndex& k, const GroupElement& a,
               const OrthFamily& family) {
  const GridSpec& xg = op.xgrid;
  const auto n = static_cast<std::size_t>(family.n);
  if (a.q.size() != n || xg.rank() != n) throw Error(ErrorCode::DimensionMismatch, "trace_rep");
  std::vector<int> steps(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double u = a.p[c] / xg.axes[c].spacing();
    if (std::abs(u - std::round(u)) > 1e-9) throw Error(ErrorCode::OffLattice, "trace_rep needs lattice p");
    steps[c] = static_cast<int>(std::round(u));
  }
  const Eigen::MatrixXd B = assemble_B(family, k);
  const Eigen::VectorXd bq = B.transpose() * Eigen::Map<const Eigen::VectorXd>(a.q.data(), static_cast<long>(n));
  const Field xnodes(xg);
  std::vector<int> xi(n), src(n);
  std::vector<double> x(n);
  cplx s{};
  for (std::size_t ix = 0; ix < xg.size(); ++ix) {
    xnodes.indices(ix, xi);
    xnodes.coords(ix, x);
    bool inside = true;
    for (std::size_t c = 0; c < n; ++c) {
      src[c] = xi[c] - steps[c];
      if (src[c] < 0 || src[c] >= xg.axes[c].points) inside = false;
    }
    if (!inside) continue;
    double ph = 0.0;
    for (std::size_t c = 0; c < n; ++c) ph -= bq[static_cast<long>(c)] * (x[c] - 0.5 * a.p[c]);
    s += cplx(std::cos(ph), std::sin(ph)) * op.values(static_cast<long>(xnodes.flat(src)), static_cast<long>(ix));
  }
  double tphase = 0.0;
  for (std::size_t j = 0; j < a.t.size(); ++j) tphase -= k.k[j] * a.t[j];
  return op.weight() * s * cplx(std::cos(tphase), std::sin(tphase));
}

// ---------------------------------------------------------------------------
// Plancherel and inversion

std::vector<FreqIndex> t_spectrum(const Field& f, double tol) {
  std::vector<FreqIndex> out;
  for (auto& k : torus_support(f, tol)) out.emplace_back(std::move(k));
  return out;
}

FourierTable fourier_table(const Field& f, const OrthFamily& family, const std::vector<FreqIndex>& ks) {
  FourierTable t;
  for (const auto& k : ks) t.push_back({k, gft(f, k, family)});
  return t;
}

PlancherelReport plancherel_gap(const Field& f, const OrthFamily& family,
                                const std::vector<FreqIndex>& ks) {
  const auto n = static_cast<double>(family.n);
  PlancherelReport r;
  for (const auto& k : ks) {
    const double hs = gft(f, k, family).hs_norm();
    r.lhs += hs * hs * two_pi_pow(-n) * std::pow(k.norm(), n);
  }
  std::vector<int> zero(static_cast<std::size_t>(family.m), 0);
  const Field f0 = torus_coeff(f, zero);
  // ||f - f^0||^2_mu with f^0 spread constant over the torus.
  Field diff = f;
  {
    const std::size_t inner_size = f.size() / f0.size();
    for (std::size_t o = 0; o < f0.size(); ++o) {
      for (std::size_t i = 0; i < inner_size; ++i) diff[o * inner_size + i] -= f0[o];
    }
  }
  const double nd = norm(diff, Measure::Mu);
  r.rhs = nd * nd;
  r.rel_err = r.rhs > 0.0 ? std::abs(r.lhs - r.rhs) / r.rhs : std::abs(r.lhs);
  const double nf0 = norm(fourier_forward(f0));
  const double nf = norm(f, Measure::Mu);
  r.lhs_augmented = r.lhs + nf0 * nf0;
  r.rhs_augmented = nf * nf;
  r.rel_err_augmented =
      r.rhs_augmented > 0.0 ? std::abs(r.lhs_augmented - r.rhs_augmented) / r.rhs_augmented : r.lhs_augmented;
  return r;
}

PlancherelReport plancherel_gap(const Field& f, const OrthFamily& family) {
  return plancherel_gap(f, family, t_spectrum(f));
}

Field invert(const FourierTable& table, const Field& f0, const OrthFamily& family, int torus_points) {
  const GridSpec& qp = f0.grid();
  const auto n = static_cast<double>(family.n);
  GridSpec g = qp;
  for (int j = 0; j < family.m; ++j) g.axes.push_back(AxisSpec::torus(torus_points));
  Field out(g);
  const std::size_t inner_size = out.size() / qp.size();
  for (std::size_t o = 0; o < qp.size(); ++o) {
    for (std::size_t i = 0; i < inner_size; ++i) out[o * inner_size + i] = f0[o];
  }
  std::vector<double> c(g.rank());
  const std::size_t m = static_cast<std::size_t>(family.m);
  for (const auto& slot : table) {
    const Field T = trace_table(slot.op, slot.k, qp, family);
    const double w = two_pi_pow(-n) * std::pow(slot.k.norm(), n);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.coords(i, c);
      double ph = 0.0;
      for (std::size_t j = 0; j < m; ++j) ph -= slot.k.k[j] * c[qp.rank() + j];
      out[i] += w * T[i / inner_size] * cplx(std::cos(ph), std::sin(ph));
    }
  }
  return out;
}

void save_table(const FourierTable& table, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
  nlohmann::json manifest;
  manifest["schema"] = 1;
  manifest["slots"] = nlohmann::json::array();
  for (std::size_t s = 0; s < table.size(); ++s) {
    const std::string file = "kernel_" + std::to_string(s) + ".bin";
    dump_field(table[s].op.as_field(), dir / file);
    nlohmann::json slot;
    slot["k"] = table[s].k.k;
    slot["norm"] = table[s].k.norm();
    slot["grid"] = nlohmann::json::parse(grid_to_json(table[s].op.xgrid));
    slot["file"] = file;
    manifest["slots"].push_back(slot);
  }
  std::ofstream os(dir / "manifest.json");
  if (!os) throw Error(ErrorCode::IoFailure, "cannot write manifest in " + dir.string());
  os << manifest.dump(2) << '\n';
}

FourierTable load_table(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw Error(ErrorCode::IoFailure, "missing manifest in " + dir.string());
  FourierTable table;
  try {
    const auto manifest = nlohmann::json::parse(is);
    for (const auto& slot : manifest.at("slots")) {
      FreqIndex k(slot.at("k").get<std::vector<int>>());
      KernelOp op = KernelOp::from_field(load_field(dir / slot.at("file").get<std::string>()));
      table.push_back({std::move(k), std::move(op)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  return table;
}

}  // namespace rhg
