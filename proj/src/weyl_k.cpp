#include "rhg/weyl_k.hpp"

#include <cmath>

#include "rhg/specials.hpp"

namespace rhg {

Field fourier_wigner_k(const Field& f, const Field& g, const FreqIndex& k, const OrthFamily& family,
                       const GridSpec& qp) {
  return fourier_wigner_general(f, g, assemble_B(family, k).transpose(), qp);
}

GridSpec symbol_grid(const GridSpec& qp) {
  GridSpec s;
  for (const auto& a : qp.axes) s.axes.push_back(a.dual());
  return s;
}

Field wigner_k(const Field& f, const Field& g, const FreqIndex& k, const OrthFamily& family,
               const GridSpec& qp) {
  return fourier_forward(fourier_wigner_k(f, g, k, family, qp));
}

KernelOp weyl_k_kernel_hat(const Field& sigma_hat, const FreqIndex& k, const OrthFamily& family) {
  KernelOp op = gft_coeff(sigma_hat, k, family);
  op.values *= std::pow(kTwoPi, -static_cast<double>(family.n));
  return op;
}

KernelOp weyl_k_kernel(const Field& sigma, const FreqIndex& k, const OrthFamily& family) {
  return weyl_k_kernel_hat(fourier_forward(sigma), k, family);
}

Field weyl_k_apply_hat(const Field& sigma_hat, const FreqIndex& k, const Field& f,
                       const OrthFamily& family) {
  if (boundary_ratio(f) > 1e-8) {
    throw Error(ErrorCode::SupportOverflow, "input state is not negligible near the grid boundary");
  }
  const KernelOp op = weyl_k_kernel_hat(sigma_hat, k, family);
  if (!(op.xgrid == f.grid())) throw Error(ErrorCode::GridMismatch, "symbol grid does not match f");
  return op.apply(f);
}

Field weyl_k_apply(const Field& sigma, const FreqIndex& k, const Field& f, const OrthFamily& family) {
  return weyl_k_apply_hat(fourier_forward(sigma), k, f, family);
}

cplx weyl_k_pairing(const Field& sigma, const FreqIndex& k, const Field& f, const Field& g,
                    const OrthFamily& family) {
  const GridSpec qp = symbol_grid(sigma.grid());
  const Field W = wigner_k(f, g, k, family, qp);
  if (!(W.grid() == sigma.grid())) throw Error(ErrorCode::GridMismatch, "pairing grids");
  cplx s{};
  for (std::size_t i = 0; i < W.size(); ++i) s += sigma[i] * W[i];
  return std::pow(kTwoPi, -0.5 * family.n) * sigma.grid().cell_weight() * s;
}

Field gaussian_twisted_conv(const Field& F, const Field& G, const FreqIndex& k,
                            const OrthFamily& family, double gauss) {
  const GridSpec& grid = F.grid();
  if (!(G.grid() == grid)) throw Error(ErrorCode::GridMismatch, "convolution grids differ");
  const auto n = static_cast<std::size_t>(family.n);
  if (grid.rank() != 2 * n) throw Error(ErrorCode::DimensionMismatch, "convolution rank");
  const std::size_t rank = 2 * n;
  const Eigen::MatrixXd B = assemble_B(family, k);
  const double k2 = k.norm() * k.norm();

  // The z-only Gaussian factor folds into G.
  Field Gw = G;
  if (gauss != 0.0) {
    std::vector<double> z(rank);
    for (std::size_t j = 0; j < Gw.size(); ++j) {
      Gw.coords(j, z);
      double e = 0.0;
      for (std::size_t a = 0; a < n; ++a) e += k2 * z[a] * z[a] + z[n + a] * z[n + a];
      Gw[j] *= std::exp(-0.5 * gauss * e);
    }
  }

  // The w-z coupling is exp(q.u(w) + p.v(w)) with
  //   u = gauss ||k||^2 xi / 2 + (i/2) B eta,  v = gauss eta / 2 - (i/2) B^t xi,
  // so per output point it factors into one table per axis.
  std::vector<std::vector<double>> nodes(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    for (int j = 0; j < grid.axes[a].points; ++j) nodes[a].push_back(grid.axes[a].node(j));
  }
  const auto str = grid.strides();
  const double w = grid.cell_weight();
  Field out(grid);
  std::vector<int> wi(rank), lo(rank), hi(rank), zi(rank);
  std::vector<double> wc(rank);
  std::vector<std::vector<cplx>> table(rank);
  Eigen::VectorXd xi(static_cast<long>(n)), eta(static_cast<long>(n));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.indices(i, wi);
    out.coords(i, wc);
    for (std::size_t a = 0; a < n; ++a) {
      xi[static_cast<long>(a)] = wc[a];
      eta[static_cast<long>(a)] = wc[n + a];
    }
    const Eigen::VectorXd Beta = B * eta;
    const Eigen::VectorXd Btxi = B.transpose() * xi;
    bool empty = false;
    for (std::size_t a = 0; a < rank; ++a) {
      const int N = grid.axes[a].points;
      lo[a] = std::max(0, wi[a] - N / 2 + 1);
      hi[a] = std::min(N - 1, wi[a] + N / 2);
      if (lo[a] > hi[a]) empty = true;
      cplx c;
      if (a < n) {
        c = cplx(0.5 * gauss * k2 * xi[static_cast<long>(a)], 0.5 * Beta[static_cast<long>(a)]);
      } else {
        const long b = static_cast<long>(a - n);
        c = cplx(0.5 * gauss * eta[b], -0.5 * Btxi[b]);
      }
      table[a].resize(static_cast<std::size_t>(N));
      for (int j = lo[a]; j <= hi[a]; ++j) table[a][static_cast<std::size_t>(j)] = std::exp(nodes[a][static_cast<std::size_t>(j)] * c);
    }
    if (empty) continue;
    // Odometer over the z box; F index is w - z + N/2 per axis.
    zi = lo;
    cplx s{};
    while (true) {
      std::size_t fz = 0, fd = 0;
      cplx e(1.0);
      for (std::size_t a = 0; a < rank; ++a) {
        fz += static_cast<std::size_t>(zi[a]) * str[a];
        fd += static_cast<std::size_t>(wi[a] - zi[a] + grid.axes[a].points / 2) * str[a];
        e *= table[a][static_cast<std::size_t>(zi[a])];
      }
      s += F[fd] * Gw[fz] * e;
      std::size_t a = rank;
      while (a > 0) {
        --a;
        if (++zi[a] <= hi[a]) break;
        zi[a] = lo[a];
        if (a == 0) {
          a = rank + 1;
          break;
        }
      }
      if (a == rank + 1) break;
    }
    out[i] = w * s;
  }
  return out;
}

Field twisted_conv(const Field& F, const Field& G, const FreqIndex& k, const OrthFamily& family) {
  return gaussian_twisted_conv(F, G, k, family, 0.0);
}

GapReport weyl_product_gap(const Field& sigma_hat, const Field& tau_hat, const FreqIndex& k,
                           const Field& f, const OrthFamily& family) {
  Field gamma_hat = twisted_conv(sigma_hat, tau_hat, k, family);
  gamma_hat *= std::pow(kTwoPi, -static_cast<double>(family.n));
  const KernelOp S = weyl_k_kernel_hat(sigma_hat, k, family);
  const KernelOp T = weyl_k_kernel_hat(tau_hat, k, family);
  const KernelOp Gm = weyl_k_kernel_hat(gamma_hat, k, family);
  const Field lhs = S.apply(T.apply(f));
  const Field rhs = Gm.apply(f);
  GapReport r;
  r.lhs_norm = norm(lhs);
  r.rhs_norm = norm(rhs);
  const double nf = norm(f);
  r.gap = nf > 0.0 ? norm(lhs - rhs) / nf : 0.0;
  return r;
}

double self_adjoint_residual(const KernelOp& op) {
  const Eigen::MatrixXcd A = op.weighted();
  const double a = A.norm();
  return a > 0.0 ? (A - A.adjoint()).norm() / a : 0.0;
}

}  // namespace rhg
