#include "rhg/localization.hpp"

#include <cmath>

namespace rhg {

namespace {

double abs_det(const Eigen::MatrixXd& B) { return std::abs(B.determinant()); }

// psi_z(x) = pi_k(q, p) phi (x) for every z = (q, p) of zgrid with F(z) != 0
// and B^t q inside the band of the x grid (beyond it psi_z is not resolved and
// pairs to zero with any band-limited input).
struct WaveletFrame {
  std::vector<std::size_t> zs;
  Eigen::MatrixXcd psi;  // one row per entry of zs, one column per x node
};

WaveletFrame wavelet_frame(const Field& F, const FreqIndex& k, const OrthFamily& family,
                           const WaveletConfig& wavelet) {
  const auto n = static_cast<std::size_t>(family.n);
  if (F.grid().rank() != 2 * n || wavelet.xgrid.rank() != n) {
    throw Error(ErrorCode::DimensionMismatch, "symbol rank must be twice the wavelet rank");
  }
  const Eigen::MatrixXd Bt = assemble_B(family, k).transpose();
  WaveletFrame fr;
  std::vector<double> band(n);
  for (std::size_t a = 0; a < n; ++a) band[a] = wavelet.xgrid.axes[a].dual().half_extent;
  {
    std::vector<double> z(2 * n);
    Eigen::VectorXd q(static_cast<long>(n));
    for (std::size_t j = 0; j < F.size(); ++j) {
      if (F[j] == cplx(0.0)) continue;
      F.coords(j, z);
      for (std::size_t a = 0; a < n; ++a) q[static_cast<long>(a)] = z[a];
      const Eigen::VectorXd Btq = Bt * q;
      bool inside = true;
      for (std::size_t a = 0; a < n; ++a) {
        if (std::abs(Btq[static_cast<long>(a)]) >= band[a]) inside = false;
      }
      if (inside) fr.zs.push_back(j);
    }
  }
  const Field xnodes(wavelet.xgrid);
  const std::size_t nx = xnodes.size();
  fr.psi.resize(static_cast<long>(fr.zs.size()), static_cast<long>(nx));
  std::vector<double> z(2 * n), x(n), xp(n);
  Eigen::VectorXd q(static_cast<long>(n));
  for (std::size_t r = 0; r < fr.zs.size(); ++r) {
    F.coords(fr.zs[r], z);
    for (std::size_t a = 0; a < n; ++a) q[static_cast<long>(a)] = z[a];
    const Eigen::VectorXd Btq = Bt * q;
    for (std::size_t i = 0; i < nx; ++i) {
      xnodes.coords(i, x);
      double ph = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        xp[a] = x[a] + z[n + a];
        ph += Btq[static_cast<long>(a)] * (x[a] + 0.5 * z[n + a]);
      }
      fr.psi(static_cast<long>(r), static_cast<long>(i)) = wavelet.value(xp) * cplx(std::cos(ph), std::sin(ph));
    }
  }
  return fr;
}

double localization_prefactor(const FreqIndex& k, const OrthFamily& family, const WaveletConfig& wavelet) {
  return std::pow(kTwoPi, static_cast<double>(family.m)) / wavelet.c_phi(k, family);
}

}  // namespace

WaveletConfig WaveletConfig::gaussian(const GridSpec& xgrid) {
  WaveletConfig w;
  w.xgrid = xgrid;
  w.phi = Field::sample(xgrid, [&w](std::span<const double> x) { return cplx(w.value(x)); });
  const double nrm = norm(w.phi);
  w.norm_sq = nrm * nrm;
  return w;
}

double WaveletConfig::value(std::span<const double> x) const {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::pow(2.0, 0.25 * static_cast<double>(x.size())) * std::exp(-0.5 * s);
}

double WaveletConfig::c_phi(const FreqIndex& k, const OrthFamily& family) const {
  return admissibility_constant(k, phi, family).constant * norm_sq;
}

double WaveletConfig::c_phi_closed(const FreqIndex& k, const OrthFamily& family) const {
  return std::pow(kTwoPi, static_cast<double>(family.m + family.n)) *
         std::pow(k.norm(), -static_cast<double>(family.n)) * norm_sq;
}

Field localize(const Field& F, const FreqIndex& k, const Field& f, const OrthFamily& family,
               const WaveletConfig& wavelet) {
  if (!(f.grid() == wavelet.xgrid)) throw Error(ErrorCode::GridMismatch, "f and wavelet grids differ");
  if (boundary_ratio(f) > 1e-8) {
    throw Error(ErrorCode::SupportOverflow, "input state is not negligible near the grid boundary");
  }
  if (boundary_ratio(fourier_forward(f)) > 1e-8) {
    throw Error(ErrorCode::SupportOverflow, "input spectrum is not negligible near the band edge");
  }
  const WaveletFrame fr = wavelet_frame(F, k, family, wavelet);
  const double hx = wavelet.xgrid.cell_weight();
  const Eigen::Map<const Eigen::VectorXcd> fv(f.values().data(), static_cast<long>(f.size()));
  // Coefficients <f, psi_z>.
  const Eigen::VectorXcd c = hx * (fr.psi.conjugate() * fv);
  Field integrand(F.grid());
  Eigen::VectorXcd a(static_cast<long>(fr.zs.size()));
  for (std::size_t r = 0; r < fr.zs.size(); ++r) {
    a[static_cast<long>(r)] = F[fr.zs[r]] * c[static_cast<long>(r)];
    integrand[fr.zs[r]] = a[static_cast<long>(r)];
  }
  if (boundary_ratio(integrand) > 1e-8) {
    throw Error(ErrorCode::SupportOverflow, "localization integrand is not negligible at the symbol grid boundary");
  }
  const double pref = localization_prefactor(k, family, wavelet) * F.grid().cell_weight();
  const Eigen::VectorXcd out = pref * (fr.psi.transpose() * a);
  Field g(wavelet.xgrid);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = out[static_cast<long>(i)];
  return g;
}

KernelOp localization_kernel(const Field& F, const FreqIndex& k, const OrthFamily& family,
                             const WaveletConfig& wavelet) {
  const WaveletFrame fr = wavelet_frame(F, k, family, wavelet);
  Eigen::VectorXcd wF(static_cast<long>(fr.zs.size()));
  for (std::size_t r = 0; r < fr.zs.size(); ++r) wF[static_cast<long>(r)] = F[fr.zs[r]];
  const double pref = localization_prefactor(k, family, wavelet) * F.grid().cell_weight();
  Eigen::MatrixXcd K = pref * (fr.psi.transpose() * wF.asDiagonal() * fr.psi.conjugate());
  return KernelOp(wavelet.xgrid, std::move(K));
}

Field lemma_kernel_ft(const Field& f, const FreqIndex& k, std::span<const double> x,
                      const GridSpec& grid, const OrthFamily& family) {
  const auto n = static_cast<std::size_t>(family.n);
  if (grid.rank() != 2 * n || x.size() != n) throw Error(ErrorCode::DimensionMismatch, "lemma grid rank");
  const Eigen::MatrixXd B = assemble_B(family, k);
  const double k2 = k.norm() * k.norm();
  const double pref = std::pow(kTwoPi, 0.5 * static_cast<double>(n)) / abs_det(B);
  Field out(grid);
  std::vector<double> w(2 * n), pts;
  std::vector<double> phase(out.size()), gauss(out.size());
  Eigen::VectorXd xi(static_cast<long>(n));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.coords(i, w);
    for (std::size_t a = 0; a < n; ++a) xi[static_cast<long>(a)] = w[a];
    // s = B^{-1} xi = B^t xi / ||k||^2.
    const Eigen::VectorXd s = B.transpose() * xi / k2;
    double ph = 0.0, e = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double eta = w[n + a];
      const double sa = s[static_cast<long>(a)];
      pts.push_back(x[a] - sa);
      ph += eta * (x[a] - 0.5 * sa);
      e += eta * eta + sa * sa;
    }
    phase[i] = ph;
    gauss[i] = std::exp(-0.25 * e);
  }
  const auto fx = interpolate(f, pts);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = pref * fx[i] * gauss[i] * cplx(std::cos(phase[i]), std::sin(phase[i]));
  }
  return out;
}

Field reindex_symbol(const Field& F, const FreqIndex& k, const OrthFamily& family) {
  const auto n = static_cast<std::size_t>(family.n);
  if (F.grid().rank() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "symbol rank");
  const Eigen::MatrixXd B = assemble_B(family, k);
  const double k2 = k.norm() * k.norm();
  std::vector<double> z(2 * n), pts;
  pts.reserve(F.size() * 2 * n);
  Eigen::VectorXd q(static_cast<long>(n)), p(static_cast<long>(n));
  for (std::size_t i = 0; i < F.size(); ++i) {
    F.coords(i, z);
    for (std::size_t a = 0; a < n; ++a) {
      q[static_cast<long>(a)] = z[a];
      p[static_cast<long>(a)] = z[n + a];
    }
    const Eigen::VectorXd u = B * p / k2;
    const Eigen::VectorXd v = -B.transpose() * q / k2;
    for (std::size_t a = 0; a < n; ++a) pts.push_back(u[static_cast<long>(a)]);
    for (std::size_t a = 0; a < n; ++a) pts.push_back(v[static_cast<long>(a)]);
  }
  const auto vals = interpolate(F, pts);
  Field out(F.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = vals[i];
  return out;
}

Field unreindex_symbol(const Field& Hk, const FreqIndex& k, const OrthFamily& family,
                       const GridSpec& target) {
  const auto n = static_cast<std::size_t>(family.n);
  if (Hk.grid().rank() != 2 * n || target.rank() != 2 * n) {
    throw Error(ErrorCode::DimensionMismatch, "symbol rank");
  }
  const Eigen::MatrixXd B = assemble_B(family, k);
  Field out(target);
  std::vector<double> z(2 * n), pts;
  Eigen::VectorXd a(static_cast<long>(n)), b(static_cast<long>(n));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.coords(i, z);
    for (std::size_t j = 0; j < n; ++j) {
      a[static_cast<long>(j)] = z[j];
      b[static_cast<long>(j)] = z[n + j];
    }
    const Eigen::VectorXd q = -B * b;
    const Eigen::VectorXd p = B.transpose() * a;
    for (std::size_t j = 0; j < n; ++j) pts.push_back(q[static_cast<long>(j)]);
    for (std::size_t j = 0; j < n; ++j) pts.push_back(p[static_cast<long>(j)]);
  }
  // H^k comes out of an FFT of a convolution; its floor sits near 1e-10.
  const auto vals = interpolate(Hk, pts, 1e-8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = vals[i];
  return out;
}

Field reindexed_hat(const Field& F, const FreqIndex& k, const GridSpec& qp, const OrthFamily& family) {
  const auto n = static_cast<std::size_t>(family.n);
  if (F.grid().rank() != 2 * n || qp.rank() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "symbol rank");
  const Eigen::MatrixXd B = assemble_B(family, k);
  const Field Fh = fourier_forward(F);
  Field out(qp);
  std::vector<double> z(2 * n), pts;
  Eigen::VectorXd q(static_cast<long>(n)), p(static_cast<long>(n));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.coords(i, z);
    for (std::size_t a = 0; a < n; ++a) {
      q[static_cast<long>(a)] = z[a];
      p[static_cast<long>(a)] = z[n + a];
    }
    const Eigen::VectorXd u = B * p;
    const Eigen::VectorXd v = -B.transpose() * q;
    for (std::size_t a = 0; a < n; ++a) pts.push_back(u[static_cast<long>(a)]);
    for (std::size_t a = 0; a < n; ++a) pts.push_back(v[static_cast<long>(a)]);
  }
  const auto vals = interpolate(Fh, pts);
  const double scale = std::pow(k.norm(), 2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * vals[i];
  return out;
}

LambdaSymbol lambda_symbol(const FreqIndex& k, const GridSpec& grid, const OrthFamily& family) {
  const auto n = static_cast<std::size_t>(family.n);
  if (grid.rank() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "symbol rank");
  const double kn = k.norm();
  const double det = abs_det(assemble_B(family, k));
  const double amp = std::pow(2.0, static_cast<double>(n)) / det;
  LambdaSymbol s;
  s.lambda = Field::sample(grid, [&](std::span<const double> z) {
    double e = 0.0;
    for (std::size_t a = 0; a < n; ++a) e += z[a] * z[a] / (kn * kn) + z[n + a] * z[n + a];
    return cplx(amp * std::exp(-e));
  });
  GridSpec dual;
  for (const auto& a : grid.axes) dual.axes.push_back(a.dual());
  s.lambda_hat = Field::sample(dual, [&](std::span<const double> z) {
    double e = 0.0;
    for (std::size_t a = 0; a < n; ++a) e += kn * kn * z[a] * z[a] + z[n + a] * z[n + a];
    return cplx(std::exp(-0.25 * e));
  });
  return s;
}

Field localization_symbol_hat(const Field& F, const FreqIndex& k, const GridSpec& xgrid,
                              const OrthFamily& family) {
  const GridSpec qp = phase_grid(xgrid, std::max(1.0, k.norm()));
  Field s = reindexed_hat(F, k, qp, family);
  const auto n = static_cast<std::size_t>(family.n);
  const double kn = k.norm();
  std::vector<double> z(2 * n);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.coords(i, z);
    double e = 0.0;
    for (std::size_t a = 0; a < n; ++a) e += kn * kn * z[a] * z[a] + z[n + a] * z[n + a];
    s[i] *= std::exp(-0.25 * e);
  }
  return s;
}

GapReport loc_as_weyl_gap(const Field& F, const FreqIndex& k, const Field& f, const OrthFamily& family,
                          const WaveletConfig& wavelet) {
  const Field lhs = localize(F, k, f, family, wavelet);
  const Field rhs = weyl_k_apply_hat(localization_symbol_hat(F, k, f.grid(), family), k, f, family);
  GapReport r;
  r.lhs_norm = norm(lhs);
  r.rhs_norm = norm(rhs);
  const double nf = norm(f);
  r.gap = nf > 0.0 ? norm(lhs - rhs) / nf : 0.0;
  return r;
}

Field new_conv(const Field& Fhat, const Field& Ghat, const FreqIndex& k, const OrthFamily& family) {
  return gaussian_twisted_conv(Fhat, Ghat, k, family, 1.0);
}

ProductSymbol product_symbol(const Field& F, const Field& G, const FreqIndex& k, const GridSpec& xgrid,
                             const OrthFamily& family) {
  const GridSpec qp = phase_grid(xgrid, std::max(1.0, k.norm()));
  ProductSymbol ps;
  ps.H_hat_k = new_conv(reindexed_hat(F, k, qp, family), reindexed_hat(G, k, qp, family), k, family);
  ps.H_hat_k *= std::pow(kTwoPi, -static_cast<double>(family.n));
  ps.H = unreindex_symbol(fourier_inverse(ps.H_hat_k), k, family, F.grid());
  return ps;
}

GapReport product_symbol_gap(const Field& F, const Field& G, const FreqIndex& k, const Field& f,
                             const OrthFamily& family, const WaveletConfig& wavelet) {
  const Field lhs = localize(F, k, localize(G, k, f, family, wavelet), family, wavelet);
  const ProductSymbol ps = product_symbol(F, G, k, f.grid(), family);
  const Field rhs = localize(ps.H, k, f, family, wavelet);
  GapReport r;
  r.lhs_norm = norm(lhs);
  r.rhs_norm = norm(rhs);
  const double nf = norm(f);
  r.gap = nf > 0.0 ? norm(lhs - rhs) / nf : 0.0;
  return r;
}

std::string to_string(WcVerdict v) {
  switch (v) {
    case WcVerdict::Member:
      return "member";
    case WcVerdict::Nonmember:
      return "nonmember";
    case WcVerdict::Inconclusive:
      break;
  }
  return "inconclusive";
}

WcReport wclass_test(const Field& Fhat_k, double c, const FreqIndex& k, const OrthFamily& family,
                     const std::vector<double>& radii) {
  const auto n = static_cast<std::size_t>(family.n);
  if (Fhat_k.grid().rank() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "symbol rank");
  if (c < 0.0) throw Error(ErrorCode::ConfigInvalid, "decay rate must be nonnegative");
  const double k2 = k.norm() * k.norm();
  WcReport rep;
  rep.c = c;
  rep.radii = radii;
  std::vector<double> sums(radii.size(), 0.0);
  std::vector<double> z(2 * n);
  for (std::size_t i = 0; i < Fhat_k.size(); ++i) {
    const double a = std::abs(Fhat_k[i]);
    if (a == 0.0) continue;
    Fhat_k.coords(i, z);
    double e = 0.0, box = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      e += k2 * z[j] * z[j] + z[n + j] * z[n + j];
      box = std::max({box, std::abs(z[j]), std::abs(z[n + j])});
    }
    const double v = std::exp(2.0 * (std::log(a) + c * e));
    for (std::size_t r = 0; r < radii.size(); ++r) {
      if (box <= radii[r]) sums[r] += v;
    }
  }
  const double w = Fhat_k.grid().cell_weight();
  for (double s : sums) rep.witness.push_back(std::sqrt(w * s));

  const std::size_t L = rep.witness.size();
  if (L < 2) return rep;
  const double last = rep.witness[L - 1];
  const double inc = last - rep.witness[L - 2];
  if (last == 0.0 || inc <= 1e-6 * last) {
    rep.verdict = WcVerdict::Member;
    return rep;
  }
  bool growing = true;
  for (std::size_t r = 2; r < L; ++r) {
    if (rep.witness[r] - rep.witness[r - 1] < rep.witness[r - 1] - rep.witness[r - 2]) growing = false;
  }
  rep.verdict = growing ? WcVerdict::Nonmember : WcVerdict::Inconclusive;
  return rep;
}

double c_epsilon(double c, double eps) {
  if (!(c > (1.0 + std::sqrt(5.0)) / 8.0)) {
    throw Error(ErrorCode::OutOfWindow, "c must exceed (1 + sqrt 5) / 8");
  }
  const double lo = 4.0 * c / (8.0 * c + 1.0);
  const double hi = 1.0 - 1.0 / (4.0 * c);
  if (!(eps > lo && eps < hi)) throw Error(ErrorCode::OutOfWindow, "epsilon outside the open window");
  return c - c * eps - 0.25;
}

}  // namespace rhg
