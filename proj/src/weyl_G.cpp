#include "rhg/weyl_G.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <tuple>

#include "rhg/specials.hpp"

namespace rhg {

namespace {

struct Dims {
  std::size_t n = 0;
  std::size_t m = 0;
};

Dims group_dims(const GridSpec& grid, const OrthFamily& family) {
  const auto n = static_cast<std::size_t>(family.n);
  const auto m = static_cast<std::size_t>(family.m);
  if (grid.rank() != 2 * n + m || grid.torus_rank() != m) {
    throw Error(ErrorCode::DimensionMismatch, "field is not on a G grid for this family");
  }
  for (std::size_t a = 0; a < 2 * n; ++a) {
    if (grid.axes[a].kind != AxisKind::RealLine) {
      throw Error(ErrorCode::AxisKindMismatch, "G grid must lead with the real axes");
    }
  }
  return {n, m};
}

GroupElement element_at(const Field& f, std::size_t i, const Dims& d) {
  std::vector<double> c(f.grid().rank());
  f.coords(i, c);
  GroupElement a;
  a.q.assign(c.begin(), c.begin() + static_cast<long>(d.n));
  a.p.assign(c.begin() + static_cast<long>(d.n), c.begin() + static_cast<long>(2 * d.n));
  a.t.assign(c.begin() + static_cast<long>(2 * d.n), c.end());
  return a;
}

// g(x^{-1}) = g(-q, -p, -t) on the lattice; the node -L has no mirror and
// is set to zero.
Field reflect(const Field& g) {
  const GridSpec& grid = g.grid();
  Field out(grid);
  std::vector<int> idx(grid.rank());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.indices(i, idx);
    bool inside = true;
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      const int N = grid.axes[a].points;
      if (grid.axes[a].kind == AxisKind::Torus) {
        idx[a] = (N - idx[a]) % N;
      } else if (idx[a] == 0) {
        inside = false;
      } else {
        idx[a] = N - idx[a];
      }
    }
    if (inside) out[i] = g[g.flat(idx)];
  }
  return out;
}

// a' -> f(a') g(a'^{-1} a) = f(a') (tau_a g_check)(a').
Field wigner_product(const Field& f, const Field& g_check, const GroupElement& a, const OrthFamily& family) {
  Field h = translate(g_check, a, family);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] *= f[i];
  return h;
}

double mu_weight(const GridSpec& grid) {
  return grid.cell_weight() / std::pow(kTwoPi, static_cast<double>(grid.torus_rank()));
}

void require_support(const Field& f, const char* what) {
  if (boundary_ratio(f) > 1e-8) {
    throw Error(ErrorCode::SupportOverflow, std::string(what) + " is not negligible near the grid boundary");
  }
}

// Products f . tau_a g below this share of max|f| max|g| contribute under
// 1e-26 to any quadratic quantity and are skipped.
bool negligible(const Field& h, double ref) { return max_abs(h) <= 1e-13 * ref; }

// tr[A B^*] for kernels on one x grid.
cplx hs_inner(const KernelOp& A, const KernelOp& B) {
  const double w = A.weight();
  return w * w * (A.values.array() * B.values.array().conjugate()).sum();
}

// Sum over a of w_mu V(f, g)(a, k) for every k, one translate per point.
std::vector<KernelOp> integrated_wigner(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                                        const OrthFamily& family) {
  const Dims d = group_dims(f.grid(), family);
  if (!(g.grid() == f.grid())) throw Error(ErrorCode::GridMismatch, "f and g grids differ");
  require_support(f, "f");
  require_support(g, "g");
  const double w = mu_weight(f.grid());
  const double ref = max_abs(f) * max_abs(g);
  const Field gc = reflect(g);
  std::vector<KernelOp> acc;
  for (std::size_t s = 0; s < ks.size(); ++s) acc.emplace_back(position_grid(strip_torus(f.grid())));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Field h = wigner_product(f, gc, element_at(f, i, d), family);
    if (negligible(h, ref)) continue;
    for (std::size_t s = 0; s < ks.size(); ++s) acc[s].values += w * gft(h, ks[s], family).values;
  }
  return acc;
}

const std::vector<std::pair<double, double>>& gauss_legendre10() {
  static const std::vector<std::pair<double, double>> rule = [] {
    const int N = 10;
    std::vector<std::pair<double, double>> r;
    for (int i = 1; i <= N; ++i) {
      double x = std::cos(kPi * (i - 0.25) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.emplace_back(x, 2.0 / ((1.0 - x * x) * dp * dp));
    }
    return r;
  }();
  return rule;
}

// Cell average of |s|^alpha over [lo, hi] intersected with [-1, 1].
double power_cell_integral(double lo, double hi, double alpha) {
  lo = std::max(lo, -1.0);
  hi = std::min(hi, 1.0);
  if (hi <= lo) return 0.0;
  auto F = [alpha](double s) { return std::copysign(std::pow(std::abs(s), alpha + 1.0), s) / (alpha + 1.0); };
  return F(hi) - F(lo);
}

// Integral of t^alpha over a torus cell [lo, hi] read in [0, 2 pi).
double torus_cell_integral(double lo, double hi, double alpha) {
  auto F = [alpha](double s) { return std::pow(s, alpha + 1.0) / (alpha + 1.0); };
  double v = 0.0;
  if (lo < 0.0) {
    v += F(kTwoPi) - F(kTwoPi + lo);
    lo = 0.0;
  }
  if (hi > kTwoPi) {
    v += F(hi - kTwoPi);
    hi = kTwoPi;
  }
  return v + F(hi) - F(lo);
}

}  // namespace

double alpha_weight(const FreqIndex& k, int n) {
  return std::pow(kTwoPi, -static_cast<double>(n)) * std::pow(k.norm(), static_cast<double>(n));
}

OperatorSymbolG OperatorSymbolG::zeros(const GridSpec& grid, std::vector<FreqIndex> ks) {
  OperatorSymbolG s;
  s.grid = grid;
  s.ks = std::move(ks);
  const GridSpec xg = s.xgrid();
  s.entries.assign(s.ks.size(), std::vector<KernelOp>(grid.size(), KernelOp(xg)));
  return s;
}

GridSpec OperatorSymbolG::xgrid() const { return position_grid(strip_torus(grid)); }

KernelOp wigner_G_at(const Field& f, const Field& g, std::size_t point, const FreqIndex& k,
                     const OrthFamily& family) {
  const Dims d = group_dims(f.grid(), family);
  if (!(g.grid() == f.grid())) throw Error(ErrorCode::GridMismatch, "f and g grids differ");
  return gft(wigner_product(f, reflect(g), element_at(f, point, d), family), k, family);
}

OperatorSymbolG wigner_G(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                         const OrthFamily& family) {
  const Dims d = group_dims(f.grid(), family);
  if (!(g.grid() == f.grid())) throw Error(ErrorCode::GridMismatch, "f and g grids differ");
  require_support(f, "f");
  require_support(g, "g");
  OperatorSymbolG out = OperatorSymbolG::zeros(f.grid(), ks);
  const double ref = max_abs(f) * max_abs(g);
  const Field gc = reflect(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Field h = wigner_product(f, gc, element_at(f, i, d), family);
    if (negligible(h, ref)) continue;
    for (std::size_t s = 0; s < ks.size(); ++s) out.entries[s][i] = gft(h, ks[s], family);
  }
  return out;
}

MoyalReport moyal_gap(const Field& f1, const Field& g1, const Field& f2, const Field& g2,
                      const std::vector<FreqIndex>& ks, const OrthFamily& family) {
  const Dims d = group_dims(f1.grid(), family);
  for (const Field* h : {&g1, &f2, &g2}) {
    if (!(h->grid() == f1.grid())) throw Error(ErrorCode::GridMismatch, "Moyal inputs on different grids");
  }
  for (const Field* h : {&f1, &g1, &f2, &g2}) require_support(*h, "Moyal input");
  const double w = mu_weight(f1.grid());
  MoyalReport r;
  const double ref1 = max_abs(f1) * max_abs(g1), ref2 = max_abs(f2) * max_abs(g2);
  const Field gc1 = reflect(g1), gc2 = reflect(g2);
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const GroupElement a = element_at(f1, i, d);
    const Field h1 = wigner_product(f1, gc1, a, family);
    if (negligible(h1, ref1)) continue;
    const Field h2 = wigner_product(f2, gc2, a, family);
    if (negligible(h2, ref2)) continue;
    for (const auto& k : ks) {
      r.lhs += w * alpha_weight(k, family.n) * hs_inner(gft(h1, k, family), gft(h2, k, family));
    }
  }
  // f - f^0: remove the torus mean.
  auto centered = [&](const Field& f) {
    const Field f0 = torus_coeff(f, std::vector<int>(d.m, 0));
    Field out = f;
    const std::size_t inner = f.size() / f0.size();
    for (std::size_t i = 0; i < f.size(); ++i) out[i] -= f0[i / inner];
    return out;
  };
  r.rhs = inner(centered(f1), centered(f2), Measure::Mu) * inner(g1, g2, Measure::Mu);
  r.scale = norm(f1, Measure::Mu) * norm(f2, Measure::Mu) * norm(g1, Measure::Mu) * norm(g2, Measure::Mu);
  const double diff = std::abs(r.lhs - r.rhs);
  r.rel_err = std::abs(r.rhs) >= 1e-8 * r.scale ? diff / std::abs(r.rhs) : (r.scale > 0.0 ? diff / r.scale : diff);
  return r;
}

double mixed_norm(const OperatorSymbolG& sigma, double r) {
  if (!(r >= 1.0)) throw Error(ErrorCode::BadExponent, "mixed norm needs r >= 1");
  const double w = mu_weight(sigma.grid);
  const int n = static_cast<int>(sigma.grid.real_rank() / 2);
  double acc = 0.0;
  for (std::size_t s = 0; s < sigma.ks.size(); ++s) {
    const double a = alpha_weight(sigma.ks[s], n);
    for (const auto& op : sigma.entries[s]) {
      if (op.values.isZero(0.0)) continue;
      const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXcd>(op.weighted()).singularValues();
      if (std::isinf(r)) {
        acc = std::max(acc, sv.size() > 0 ? sv[0] : 0.0);
      } else {
        acc += w * a * sv.array().pow(r).sum();
      }
    }
  }
  return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

RecoveryReport ft_recovery_gap(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                               const OrthFamily& family) {
  RecoveryReport r;
  r.C = integrate(g, Measure::Mu);
  if (std::abs(r.C) <= 1e-12 * norm(g, Measure::Mu)) throw Error(ErrorCode::ZeroC, "int g dmu vanishes");
  const auto acc = integrated_wigner(f, g, ks, family);
  for (std::size_t s = 0; s < ks.size(); ++s) {
    const KernelOp Ff = gft(f, ks[s], family);
    const double ref = Ff.hs_norm();
    KernelOp diff = acc[s];
    diff.values = diff.values / r.C - Ff.values;
    const double e = ref > 0.0 ? diff.hs_norm() / ref : diff.hs_norm();
    r.rel_err.push_back(e);
    r.max_rel_err = std::max(r.max_rel_err, e);
  }
  return r;
}

FourierTable wigner_fourier_table(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                                  const OrthFamily& family) {
  const cplx C = integrate(g, Measure::Mu);
  if (std::abs(C) <= 1e-12 * norm(g, Measure::Mu)) throw Error(ErrorCode::ZeroC, "int g dmu vanishes");
  auto acc = integrated_wigner(f, g, ks, family);
  FourierTable table;
  for (std::size_t s = 0; s < ks.size(); ++s) {
    acc[s].values /= C;
    table.push_back({ks[s], std::move(acc[s])});
  }
  return table;
}

Field wigner_inversion(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                       const OrthFamily& family) {
  group_dims(f.grid(), family);
  const FourierTable table = wigner_fourier_table(f, g, ks, family);
  const Field zero(strip_torus(f.grid()));
  return invert(table, zero, family, f.grid().axes.back().points);
}

double KernelG::weight() const { return mu_weight(grid); }

Field KernelG::apply(const Field& f) const {
  if (!(f.grid() == grid)) throw Error(ErrorCode::GridMismatch, "kernel grid does not match f");
  const Eigen::Map<const Eigen::VectorXcd> v(f.values().data(), static_cast<long>(f.size()));
  const Eigen::VectorXcd out = weight() * (values * v);
  return Field(grid, std::vector<cplx>(out.data(), out.data() + out.size()));
}

KernelG weyl_G_kernel(const OperatorSymbolG& sigma, const OrthFamily& family) {
  const GridSpec& grid = sigma.grid;
  const Dims d = group_dims(grid, family);
  if (grid.size() > kMaxKernelPoints) {
    throw Error(ErrorCode::KernelTooLarge, "G grid exceeds " + std::to_string(kMaxKernelPoints) + " points");
  }
  const GridSpec qp = strip_torus(grid);
  const std::size_t nqp = qp.size();
  const std::size_t nt = grid.size() / nqp;
  const GridSpec xg = sigma.xgrid();

  // Torus frequencies j of the t samples, symmetric range.
  std::vector<std::vector<int>> freqs(nt, std::vector<int>(d.m));
  std::vector<std::vector<double>> tnodes(nt, std::vector<double>(d.m));
  {
    GridSpec tg;
    for (std::size_t j = 0; j < d.m; ++j) tg.axes.push_back(grid.axes[2 * d.n + j]);
    const Field tf(tg);
    std::vector<int> idx(d.m);
    for (std::size_t l = 0; l < nt; ++l) {
      tf.indices(l, idx);
      tf.coords(l, tnodes[l]);
      for (std::size_t j = 0; j < d.m; ++j) {
        const int N = tg.axes[j].points;
        freqs[l][j] = idx[j] < N / 2 ? idx[j] : idx[j] - N;
      }
    }
  }

  // conj tr[pi_k(q, p, 0)^* sigma_j(c)] as a table over (q, p), per slot, j and c.
  struct Coeff {
    std::size_t slot;
    std::size_t j;
    std::vector<Field> table;  // [c], empty Field when sigma_j(c) = 0
  };
  std::vector<Coeff> coeffs;
  for (std::size_t s = 0; s < sigma.ks.size(); ++s) {
    for (std::size_t j = 0; j < nt; ++j) {
      Coeff cf{s, j, std::vector<Field>(nqp)};
      bool any = false;
      for (std::size_t c = 0; c < nqp; ++c) {
        KernelOp sj(xg);
        for (std::size_t l = 0; l < nt; ++l) {
          double ph = 0.0;
          for (std::size_t a = 0; a < d.m; ++a) ph -= freqs[j][a] * tnodes[l][a];
          sj.values += std::polar(1.0 / static_cast<double>(nt), ph) * sigma.entries[s][c * nt + l].values;
        }
        if (sj.values.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, sigma.entries[s][c * nt].values.cwiseAbs().maxCoeff())) {
          continue;
        }
        Field T = trace_table(sj, sigma.ks[s], qp, family);
        for (std::size_t i = 0; i < T.size(); ++i) T[i] = std::conj(T[i]);
        cf.table[c] = std::move(T);
        any = true;
      }
      if (any) coeffs.push_back(std::move(cf));
    }
  }

  // Per (q, p) point: axis indices, x, B_j y and B_j^t x for the bracket.
  const Field qpf(qp);
  std::vector<std::vector<int>> idx(nqp, std::vector<int>(2 * d.n));
  std::vector<std::vector<double>> By(nqp, std::vector<double>(d.m * d.n)), Btx(nqp, std::vector<double>(d.m * d.n)),
      xs(nqp, std::vector<double>(d.n)), ys(nqp, std::vector<double>(d.n));
  for (std::size_t i = 0; i < nqp; ++i) {
    std::vector<double> c(2 * d.n);
    qpf.indices(i, idx[i]);
    qpf.coords(i, c);
    Eigen::VectorXd x(static_cast<long>(d.n)), y(static_cast<long>(d.n));
    for (std::size_t a = 0; a < d.n; ++a) {
      x[static_cast<long>(a)] = xs[i][a] = c[a];
      y[static_cast<long>(a)] = ys[i][a] = c[d.n + a];
    }
    for (std::size_t j = 0; j < d.m; ++j) {
      const Eigen::VectorXd u = family.B[j] * y;
      const Eigen::VectorXd v = family.B[j].transpose() * x;
      for (std::size_t a = 0; a < d.n; ++a) {
        By[i][j * d.n + a] = u[static_cast<long>(a)];
        Btx[i][j * d.n + a] = v[static_cast<long>(a)];
      }
    }
  }
  const auto str = qp.strides();

  KernelG K;
  K.grid = grid;
  K.values = Eigen::MatrixXcd::Zero(static_cast<long>(grid.size()), static_cast<long>(grid.size()));
  std::vector<double> br(d.m), tc(d.m);
  for (std::size_t ib = 0; ib < nqp; ++ib) {
    for (std::size_t ia = 0; ia < nqp; ++ia) {
      // c = (q_a + q_b, p_a + p_b) on the lattice.
      std::size_t c = 0;
      bool inside = true;
      for (std::size_t a = 0; a < 2 * d.n; ++a) {
        const int N = qp.axes[a].points;
        const int ic = idx[ia][a] + idx[ib][a] - N / 2;
        if (ic < 0 || ic >= N) {
          inside = false;
          break;
        }
        c += static_cast<std::size_t>(ic) * str[a];
      }
      if (!inside) continue;
      // [z_a, z_b]_j = x_b . B_j y_a - x_a . B_j y_b.
      for (std::size_t j = 0; j < d.m; ++j) {
        double v = 0.0;
        for (std::size_t a = 0; a < d.n; ++a) v += xs[ib][a] * By[ia][j * d.n + a] - Btx[ia][j * d.n + a] * ys[ib][a];
        br[j] = v;
      }
      for (const auto& cf : coeffs) {
        const Field& T = cf.table[c];
        if (T.size() == 0) continue;
        const cplx tr = T[ia];
        if (tr == cplx(0.0)) continue;
        const FreqIndex& k = sigma.ks[cf.slot];
        const double aw = alpha_weight(k, family.n);
        for (std::size_t lb = 0; lb < nt; ++lb) {
          for (std::size_t la = 0; la < nt; ++la) {
            double ph = 0.0;
            for (std::size_t j = 0; j < d.m; ++j) {
              tc[j] = tnodes[la][j] + tnodes[lb][j] + 0.5 * br[j];
              ph += k.k[j] * tnodes[la][j] - freqs[cf.j][j] * tc[j];
            }
            K.values(static_cast<long>(ib * nt + lb), static_cast<long>(ia * nt + la)) += aw * tr * std::polar(1.0, ph);
          }
        }
      }
    }
  }
  return K;
}

OperatorSymbolG adjoint_symbol(const OperatorSymbolG& sigma, const OrthFamily& family) {
  const Dims d = group_dims(sigma.grid, family);
  const GridSpec qp = strip_torus(sigma.grid);
  const std::size_t nt = sigma.grid.size() / qp.size();
  const GridSpec xg = sigma.xgrid();
  const Field xf(xg), qpf(qp);
  const std::size_t nx = xg.size();
  OperatorSymbolG out = OperatorSymbolG::zeros(sigma.grid, sigma.ks);
  std::vector<double> z(2 * d.n), t(d.m), x(d.n);
  std::vector<int> zi(2 * d.n), xi(d.n), src(d.n);
  std::vector<std::vector<double>> tnodes(nt, std::vector<double>(sigma.grid.rank()));
  {
    const Field gf(sigma.grid);
    for (std::size_t l = 0; l < nt; ++l) {
      gf.coords(l, tnodes[l]);
      tnodes[l].erase(tnodes[l].begin(), tnodes[l].begin() + static_cast<long>(2 * d.n));
    }
  }
  for (std::size_t s = 0; s < sigma.ks.size(); ++s) {
    const Eigen::MatrixXd B = assemble_B(family, sigma.ks[s]);
    for (std::size_t c = 0; c < qp.size(); ++c) {
      const Eigen::MatrixXcd& S0 = sigma.entries[s][c * nt].values;
      for (std::size_t l = 1; l < nt; ++l) {
        if ((sigma.entries[s][c * nt + l].values - S0).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, S0.cwiseAbs().maxCoeff())) {
          throw Error(ErrorCode::BadRange, "adjoint symbol needs a t-independent sigma");
        }
      }
      if (S0.isZero(0.0)) continue;
      const Eigen::MatrixXcd Sa = S0.adjoint();
      qpf.coords(c, z);
      qpf.indices(c, zi);
      Eigen::VectorXd q(static_cast<long>(d.n));
      for (std::size_t a = 0; a < d.n; ++a) q[static_cast<long>(a)] = z[a];
      const Eigen::VectorXd Btq = B.transpose() * q;
      // (pi_k(q, p, 0) S)(x, y) = e^{i q.B(x + p/2)} S(x + p, y), p on the x lattice.
      Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(static_cast<long>(nx), static_cast<long>(nx));
      for (std::size_t r = 0; r < nx; ++r) {
        xf.coords(r, x);
        xf.indices(r, xi);
        bool inside = true;
        double ph = 0.0;
        for (std::size_t a = 0; a < d.n; ++a) {
          src[a] = xi[a] + zi[d.n + a] - xg.axes[a].points / 2;
          if (src[a] < 0 || src[a] >= xg.axes[a].points) inside = false;
          ph += Btq[static_cast<long>(a)] * (x[a] + 0.5 * z[d.n + a]);
        }
        if (!inside) continue;
        T.row(static_cast<long>(r)) = std::polar(1.0, ph) * Sa.row(static_cast<long>(xf.flat(src)));
      }
      for (std::size_t l = 0; l < nt; ++l) {
        double ph = 0.0;
        for (std::size_t j = 0; j < d.m; ++j) ph += sigma.ks[s].k[j] * tnodes[l][j];
        out.entries[s][c * nt + l].values = std::polar(1.0, ph) * T;
      }
    }
  }
  return out;
}

cplx weyl_G_pairing(const KernelG& K, const Field& f, const Field& g) {
  const Field Wf = K.apply(f);
  cplx s{};
  for (std::size_t i = 0; i < Wf.size(); ++i) s += Wf[i] * g[i];
  return K.weight() * s;
}

cplx wigner_symbol_pairing(const Field& f, const Field& g, const OperatorSymbolG& sigma,
                           const OrthFamily& family) {
  const Dims d = group_dims(f.grid(), family);
  if (!(f.grid() == sigma.grid) || !(g.grid() == sigma.grid)) {
    throw Error(ErrorCode::GridMismatch, "symbol and fields on different grids");
  }
  require_support(f, "f");
  require_support(g, "g");
  const double w = mu_weight(f.grid());
  const Field gc = reflect(g);
  cplx s{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    bool any = false;
    for (std::size_t sl = 0; sl < sigma.ks.size(); ++sl) any = any || !sigma.entries[sl][i].values.isZero(0.0);
    if (!any) continue;
    const Field h = wigner_product(f, gc, element_at(f, i, d), family);
    for (std::size_t sl = 0; sl < sigma.ks.size(); ++sl) {
      const KernelOp& S = sigma.entries[sl][i];
      if (S.values.isZero(0.0)) continue;
      // tr[S^* V] = conj(tr[V^* S]) = conj(<S, V>) with <A, B> = tr[A B^*].
      s += w * alpha_weight(sigma.ks[sl], family.n) * hs_inner(gft(h, sigma.ks[sl], family), S);
    }
  }
  return s;
}

Eigen::VectorXd singular_values(const KernelG& K) {
  return Eigen::BDCSVD<Eigen::MatrixXcd>(K.weighted()).singularValues();
}

SchattenReport schatten_suite(const OperatorSymbolG& sigma, const OrthFamily& family, double s2_tol) {
  const KernelG K = weyl_G_kernel(sigma, family);
  const Eigen::VectorXd sv = singular_values(K);
  SchattenReport r;
  r.s1.r = 1.0;
  r.s1.lhs = sv.sum();
  r.s1.rhs = std::pow(2.0, -2.0 * family.n - family.m) * mixed_norm(sigma, 1.0);
  r.s1.slack = r.s1.rhs - r.s1.lhs;
  r.s1.rel_err = r.s1.rhs > 0.0 ? std::max(0.0, -r.s1.slack) / r.s1.rhs : 0.0;
  r.s1.pass = r.s1.lhs <= r.s1.rhs * (1.0 + 1e-12) + 1e-300;

  r.s2.r = 2.0;
  r.s2.lhs = sv.squaredNorm();
  const double n2 = mixed_norm(sigma, 2.0);
  r.s2.rhs = n2 * n2;
  r.s2.slack = r.s2.rhs - r.s2.lhs;
  r.s2.rel_err = r.s2.rhs > 0.0 ? std::abs(r.s2.slack) / r.s2.rhs : std::abs(r.s2.lhs);
  r.s2.pass = r.s2.rhs > 0.0 ? r.s2.rel_err <= s2_tol : r.s2.lhs == 0.0;
  return r;
}

OperatorSymbolG random_single_k_symbol(std::uint64_t seed, const OrthFamily& family, int points,
                                       double half_extent, int torus_points) {
  std::mt19937_64 rng(seed);
  auto uni = [&rng](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  const std::size_t n = static_cast<std::size_t>(family.n);
  std::vector<int> kv(static_cast<std::size_t>(family.m), 0);
  kv[rng() % kv.size()] = (rng() % 2 == 0 ? 1 : -1) * static_cast<int>(1 + rng() % 2);
  const FreqIndex k(kv);
  const GridSpec xg = GridSpec::real(family.n, half_extent, points);
  const GridSpec grid = group_grid_for(xg, family.m, torus_points, k.norm());
  const double qext = grid.axes[0].half_extent;

  std::vector<double> cq(n), cp(n), wq(n), wp(n), cu(n), cv(n), wu(n), wv(n), mu(n);
  for (std::size_t a = 0; a < n; ++a) {
    cq[a] = uni(-0.1, 0.1) * qext;
    cp[a] = uni(-0.1, 0.1) * half_extent;
    wq[a] = uni(0.06, 0.1) * qext;
    wp[a] = uni(0.06, 0.1) * half_extent;
    cu[a] = uni(-0.5, 0.5);
    cv[a] = uni(-0.5, 0.5);
    wu[a] = uni(0.7, 1.2);
    wv[a] = uni(0.7, 1.2);
    mu[a] = uni(-0.5, 0.5);
  }
  std::vector<int> jt(static_cast<std::size_t>(family.m));
  for (auto& j : jt) j = static_cast<int>(rng() % 3) - 1;
  const cplx amp(uni(0.5, 1.5), uni(-0.5, 0.5));

  const Field u = Field::sample(xg, [&](std::span<const double> x) {
    double e = 0.0;
    for (std::size_t a = 0; a < n; ++a) e += (x[a] - cu[a]) * (x[a] - cu[a]) / (2.0 * wu[a] * wu[a]);
    return cplx(std::exp(-e));
  });
  const Field v = Field::sample(xg, [&](std::span<const double> x) {
    double e = 0.0, ph = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      e += (x[a] - cv[a]) * (x[a] - cv[a]) / (2.0 * wv[a] * wv[a]);
      ph += mu[a] * x[a];
    }
    return std::exp(-e) * std::polar(1.0, ph);
  });
  const Eigen::Map<const Eigen::VectorXcd> uu(u.values().data(), static_cast<long>(u.size()));
  const Eigen::Map<const Eigen::VectorXcd> vv(v.values().data(), static_cast<long>(v.size()));
  const Eigen::MatrixXcd A = uu * vv.adjoint();

  OperatorSymbolG sigma = OperatorSymbolG::zeros(grid, {k});
  const Field gf(grid);
  std::vector<double> c(grid.rank());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    gf.coords(i, c);
    double e = 0.0, ph = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      e += (c[a] - cq[a]) * (c[a] - cq[a]) / (2.0 * wq[a] * wq[a]);
      e += (c[n + a] - cp[a]) * (c[n + a] - cp[a]) / (2.0 * wp[a] * wp[a]);
    }
    for (std::size_t j = 0; j < jt.size(); ++j) ph += jt[j] * c[2 * n + j];
    sigma.entries[0][i].values = amp * std::exp(-e) * std::polar(1.0, ph) * A;
  }
  return sigma;
}

Field f_alpha_sample(double alpha, const GridSpec& grid, const OrthFamily& family) {
  if (!(alpha > -0.5)) throw Error(ErrorCode::BadAlpha, "f_alpha needs alpha > -1/2");
  const Dims d = group_dims(grid, family);
  // Separable: one table of cell averages per axis.
  std::vector<std::vector<double>> avg(grid.rank());
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    const auto& ax = grid.axes[a];
    const double h = ax.spacing();
    for (int j = 0; j < ax.points; ++j) {
      const double x = ax.node(j);
      const double v = a < 2 * d.n ? power_cell_integral(x - 0.5 * h, x + 0.5 * h, alpha)
                                   : torus_cell_integral(x - 0.5 * h, x + 0.5 * h, alpha);
      avg[a].push_back(v / h);
    }
  }
  Field out(grid);
  std::vector<int> idx(grid.rank());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.indices(i, idx);
    double v = 1.0;
    for (std::size_t a = 0; a < grid.rank(); ++a) v *= avg[a][static_cast<std::size_t>(idx[a])];
    out[i] = v;
  }
  return out;
}

cplx graded_power_integral(double alpha, double T, const std::function<cplx(double)>& phi,
                           const std::vector<cplx>& taylor, int panels) {
  if (!(alpha > -1.0)) throw Error(ErrorCode::BadAlpha, "t^alpha needs alpha > -1");
  const double P = panels;
  const double x1 = T / (P * P);
  cplx s{};
  for (std::size_t j = 0; j < taylor.size(); ++j) {
    const double e = static_cast<double>(j) + alpha + 1.0;
    s += taylor[j] * std::pow(x1, e) / e;
  }
  const auto& rule = gauss_legendre10();
  for (int j = 1; j < panels; ++j) {
    const double a = T * (j / P) * (j / P);
    const double b = T * ((j + 1) / P) * ((j + 1) / P);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (const auto& [x, w] : rule) {
      const double t = mid + half * x;
      s += half * w * std::pow(t, alpha) * phi(t);
    }
  }
  return s;
}

double f_alpha_norm_sq(double alpha, int n, int m) {
  if (!(alpha > -0.5)) throw Error(ErrorCode::BadAlpha, "f_alpha needs alpha > -1/2");
  const auto one = [](double) { return cplx(1.0); };
  const double tpart = graded_power_integral(2.0 * alpha, kTwoPi, one, {1.0}).real() / kTwoPi;
  const double qpart = 2.0 * graded_power_integral(2.0 * alpha, 1.0, one, {1.0}).real();
  return std::pow(tpart, m) * std::pow(qpart, 2 * n);
}

namespace {

cplx t_factor(int k, double alpha) {
  std::vector<cplx> taylor(30);
  cplx c(1.0);
  for (std::size_t j = 0; j < taylor.size(); ++j) {
    taylor[j] = c;
    c *= cplx(0.0, k) / static_cast<double>(j + 1);
  }
  const auto phi = [k](double t) { return std::polar(1.0, k * t); };
  return graded_power_integral(alpha, kTwoPi, phi, taylor) / kTwoPi;
}

double q_factor(double knorm, double alpha) {
  const double kappa = 0.25 * knorm;
  std::vector<cplx> taylor(60, cplx(0.0));
  double c = 1.0;
  for (std::size_t j = 0; 2 * j < taylor.size(); ++j) {
    taylor[2 * j] = c;
    c *= -kappa / static_cast<double>(j + 1);
  }
  const auto phi = [kappa](double q) { return cplx(std::exp(-kappa * q * q)); };
  return 2.0 * graded_power_integral(alpha, 1.0, phi, taylor).real();
}

}  // namespace

cplx GaussianME::value(int n) const {
  cplx v(std::pow(q_factor, 2 * n));
  for (const auto& t : t_factor) v *= t;
  return v;
}

cplx GaussianME::value_with_extra_constant(int n) const {
  return std::pow(kTwoPi, -0.5 * n) * value(n);
}

GaussianME gaussian_me_1d(const FreqIndex& k, double alpha) {
  if (!(alpha > -1.0)) throw Error(ErrorCode::BadAlpha, "matrix element needs alpha > -1");
  GaussianME r;
  for (int kj : k.k) r.t_factor.push_back(t_factor(kj, alpha));
  const double kn = k.norm();
  r.q_factor = q_factor(kn, alpha);
  r.q_gamma_limit = std::pow(2.0 / std::sqrt(kn), alpha + 1.0) * std::tgamma(0.5 * (alpha + 1.0));
  return r;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const auto N = static_cast<double>(x.size());
  if (x.size() < 2 || x.size() != y.size()) return {0.0, 0.0};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / N;
    my += y[i] / N;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return {0.0, 0.0};
  const double b = sxy / sxx;
  const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return {b, r2};
}

DivergenceReport divergence_partial_sums(double alpha, double r_prime, int K_max, const OrthFamily& family) {
  const int n = family.n, m = family.m;
  if (!(alpha > -0.5)) throw Error(ErrorCode::BadRange, "alpha must exceed -1/2");
  if (!(r_prime >= 1.0 && r_prime <= 2.0)) throw Error(ErrorCode::BadRange, "r' must lie in [1, 2]");
  if (K_max < 1 || m < 1 || std::pow(static_cast<double>(K_max), m) > 4e6) {
    throw Error(ErrorCode::BadRange, "K_max out of range");
  }
  DivergenceReport r;
  r.alpha = alpha;
  r.r_prime = r_prime;
  r.n = n;
  r.m = m;
  r.exponent = (m + n) * (alpha + 1.0) * r_prime - n;

  std::vector<double> tabs(static_cast<std::size_t>(K_max) + 1);
  for (int k = 1; k <= K_max; ++k) tabs[static_cast<std::size_t>(k)] = std::abs(t_factor(k, alpha));
  std::map<long, double> qcache;
  std::vector<double> bucket(static_cast<std::size_t>(K_max) + 1, 0.0);
  std::vector<int> kv(static_cast<std::size_t>(m), 1);
  while (true) {
    long n2 = 0;
    int top = 0;
    double t = 1.0;
    for (int kj : kv) {
      n2 += static_cast<long>(kj) * kj;
      top = std::max(top, kj);
      t *= tabs[static_cast<std::size_t>(kj)];
    }
    const double kn = std::sqrt(static_cast<double>(n2));
    auto it = qcache.find(n2);
    if (it == qcache.end()) it = qcache.emplace(n2, q_factor(kn, alpha)).first;
    const double me = t * std::pow(it->second, 2 * n);
    bucket[static_cast<std::size_t>(top)] +=
        std::pow(me, r_prime) * std::pow(kTwoPi, -static_cast<double>(n)) * std::pow(kn, n);
    std::size_t a = kv.size();
    bool done = false;
    while (true) {
      if (a == 0) {
        done = true;
        break;
      }
      --a;
      if (++kv[a] <= K_max) break;
      kv[a] = 1;
    }
    if (done) break;
  }
  double S = 0.0;
  r.strictly_increasing = true;
  for (int K = 1; K <= K_max; ++K) {
    const double prev = S;
    S += bucket[static_cast<std::size_t>(K)];
    if (!(S > prev)) r.strictly_increasing = false;
    r.S.push_back(S);
  }
  std::vector<double> lx, ly;
  for (int K = 1; K <= K_max; K *= 2) {
    DivergenceRow row;
    row.K = K;
    row.S = r.S[static_cast<std::size_t>(K - 1)];
    row.increment = K == 1 ? row.S : row.S - r.S[static_cast<std::size_t>(K / 2 - 1)];
    row.log_slope = K == 1 ? 0.0 : row.increment / std::log(2.0);
    r.ladder.push_back(row);
    lx.push_back(std::log(static_cast<double>(K)));
    ly.push_back(row.S);
  }
  std::tie(r.fit_slope, r.fit_r2) = linear_fit(lx, ly);
  return r;
}

std::string divergence_csv(const DivergenceReport& report) {
  std::string out = "K,S,increment,log_slope\n";
  char buf[160];
  for (const auto& row : report.ladder) {
    std::snprintf(buf, sizeof buf, "%d,%.12e,%.12e,%.12e\n", row.K, row.S, row.increment, row.log_slope);
    out += buf;
  }
  return out;
}

}  // namespace rhg
