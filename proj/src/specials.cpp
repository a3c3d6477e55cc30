#include "rhg/specials.hpp"

#include <cmath>

namespace rhg {

std::vector<double> hermite_values(int k, std::span<const double> x) {
  if (k < 0) throw Error(ErrorCode::NegativeDegree, "Hermite degree must be nonnegative");
  if (k > kMaxDegree) throw Error(ErrorCode::NegativeDegree, "Hermite degree above 32");
  std::vector<double> out(x.size());
  const double c0 = std::pow(kPi, -0.25);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double prev = 0.0;
    double cur = c0 * std::exp(-0.5 * xi * xi);
    for (int j = 0; j < k; ++j) {
      const double next =
          xi * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
      prev = cur;
      cur = next;
    }
    out[i] = cur;
  }
  return out;
}

Field hermite_h(int k, const GridSpec& grid) {
  if (grid.rank() != 1) throw Error(ErrorCode::DimensionMismatch, "hermite_h needs a 1-D grid");
  std::vector<double> x(static_cast<std::size_t>(grid.axes[0].points));
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = grid.axes[0].node(static_cast<int>(j));
  const auto v = hermite_values(k, x);
  return Field(grid, std::vector<cplx>(v.begin(), v.end()));
}

std::vector<double> laguerre(int k, double alpha, std::span<const double> x) {
  if (k < 0) throw Error(ErrorCode::NegativeDegree, "Laguerre degree must be nonnegative");
  if (!(alpha > -1.0)) throw Error(ErrorCode::BadOrder, "Laguerre order must exceed -1");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double prev = 0.0;
    double cur = 1.0;
    for (int j = 0; j < k; ++j) {
      const double next = ((2.0 * j + 1.0 + alpha - x[i]) * cur - (j + alpha) * prev) / (j + 1.0);
      prev = cur;
      cur = next;
    }
    out[i] = cur;
  }
  return out;
}

namespace {

Field hermite_product(const MultiIndex& gamma, const GridSpec& grid, double scale) {
  if (gamma.size() != grid.rank()) throw Error(ErrorCode::DimensionMismatch, "multi-index length");
  std::vector<std::vector<double>> factors(grid.rank());
  for (std::size_t a = 0; a < grid.rank(); ++a) {
    const auto& ax = grid.axes[a];
    if (ax.kind != AxisKind::RealLine) throw Error(ErrorCode::AxisKindMismatch, "Hermite on torus");
    std::vector<double> x(static_cast<std::size_t>(ax.points));
    for (int j = 0; j < ax.points; ++j) x[static_cast<std::size_t>(j)] = scale * ax.node(j);
    factors[a] = hermite_values(gamma[a], x);
  }
  Field f(grid);
  std::vector<int> idx(grid.rank());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.indices(i, idx);
    double v = 1.0;
    for (std::size_t a = 0; a < grid.rank(); ++a) v *= factors[a][static_cast<std::size_t>(idx[a])];
    f[i] = v;
  }
  return f;
}

}  // namespace

Field phi_gamma(const MultiIndex& gamma, const GridSpec& grid) {
  return hermite_product(gamma, grid, 1.0);
}

Field phi_gamma_k(const MultiIndex& gamma, double knorm, const GridSpec& grid) {
  if (!(knorm > 0.0)) throw Error(ErrorCode::ZeroLambda, "scale must be positive");
  Field f = hermite_product(gamma, grid, std::sqrt(knorm));
  f *= std::pow(knorm, 0.25 * static_cast<double>(grid.rank()));
  return f;
}

GridSpec position_grid(const GridSpec& qp) {
  if (qp.rank() % 2 != 0 || qp.torus_rank() != 0) {
    throw Error(ErrorCode::DimensionMismatch, "(q, p) grid must have even rank and no torus axes");
  }
  const std::size_t n = qp.rank() / 2;
  return GridSpec(std::vector<AxisSpec>(qp.axes.begin() + static_cast<long>(n), qp.axes.end()));
}

Field fourier_wigner_general(const Field& f, const Field& g, const Eigen::MatrixXd& M,
                             const GridSpec& qp) {
  const GridSpec& xg = f.grid();
  const std::size_t n = xg.rank();
  if (!(g.grid() == xg)) throw Error(ErrorCode::GridMismatch, "f and g grids differ");
  if (qp.rank() != 2 * n || M.rows() != static_cast<long>(n) || M.cols() != static_cast<long>(n)) {
    throw Error(ErrorCode::DimensionMismatch, "phase-space grid rank");
  }
  if (boundary_ratio(f) > 1e-8 || boundary_ratio(g) > 1e-8) {
    throw Error(ErrorCode::SupportOverflow, "input is not negligible near the grid boundary");
  }

  // p nodes as lattice offsets of the x grid.
  std::vector<std::vector<int>> pstep(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& pa = qp.axes[n + a];
    const auto& xa = xg.axes[a];
    if (std::abs(pa.spacing() - xa.spacing()) > 1e-12 * xa.spacing()) {
      throw Error(ErrorCode::OffLattice, "p axis spacing differs from the x grid");
    }
    for (int j = 0; j < pa.points; ++j) {
      const double u = pa.node(j) / xa.spacing();
      if (std::abs(u - std::round(u)) > 1e-9) {
        throw Error(ErrorCode::OffLattice, "p nodes are not on the x lattice");
      }
      pstep[a].push_back(static_cast<int>(std::round(u)));
    }
  }

  // Map every q node to M q and, when possible, to a node of the dual grid.
  GridSpec qgrid(std::vector<AxisSpec>(qp.axes.begin(), qp.axes.begin() + static_cast<long>(n)));
  GridSpec dual;
  for (const auto& a : xg.axes) dual.axes.push_back(a.dual());
  const Field qnodes(qgrid);
  const std::size_t nq = qgrid.size();
  std::vector<double> mq(nq * n);
  std::vector<long> dual_index(nq, -1);
  // M q beyond the x-grid band: the discrete sum would alias, so these
  // samples are zero and the spectrum must be negligible at the band edge.
  std::vector<bool> out_of_band(nq, false);
  {
    std::vector<double> q(n);
    std::vector<int> di(n);
    const auto dstr = dual.strides();
    for (std::size_t i = 0; i < nq; ++i) {
      qnodes.coords(i, q);
      const Eigen::Map<const Eigen::VectorXd> qv(q.data(), static_cast<long>(n));
      const Eigen::VectorXd w = M * qv;
      long flat = 0;
      bool ok = true;
      for (std::size_t a = 0; a < n; ++a) {
        mq[i * n + a] = w[static_cast<long>(a)];
        const double band = dual.axes[a].half_extent;
        if (w[static_cast<long>(a)] < -band - 1e-9 * band || w[static_cast<long>(a)] > band + 1e-9 * band) {
          out_of_band[i] = true;
        }
        const int li = dual.axes[a].lattice_index(w[static_cast<long>(a)]);
        if (li < 0 || li >= dual.axes[a].points) ok = false;
        flat += static_cast<long>(li) * static_cast<long>(dstr[a]);
      }
      if (ok && !out_of_band[i]) dual_index[i] = flat;
    }
  }
  bool any_lattice = false, any_direct = false, any_out = false;
  for (std::size_t i = 0; i < nq; ++i) {
    if (out_of_band[i]) {
      any_out = true;
    } else {
      (dual_index[i] >= 0 ? any_lattice : any_direct) = true;
    }
  }
  const double scale = std::pow(2.0 * M_PI, -0.5 * static_cast<double>(n)) * norm(f) * norm(g);

  Field out(qp);
  const Field pnodes(GridSpec(std::vector<AxisSpec>(qp.axes.begin() + static_cast<long>(n), qp.axes.end())));
  const std::size_t np = pnodes.size();
  std::vector<int> pidx(n), steps(n);
  std::vector<double> p(n);
  for (std::size_t ip = 0; ip < np; ++ip) {
    pnodes.indices(ip, pidx);
    pnodes.coords(ip, p);
    for (std::size_t a = 0; a < n; ++a) steps[a] = pstep[a][static_cast<std::size_t>(pidx[a])];
    Field h = lattice_shift(f, steps);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] *= std::conj(g[i]);
    Field H;
    if (any_lattice || any_out) H = fourier_inverse(h);
    if (any_out && boundary_ratio(H) * max_abs(H) > 1e-10 * scale) {
      throw Error(ErrorCode::InterpolationOverflow,
                  "M q leaves the band of the x grid while the spectrum is not negligible there");
    }
    std::vector<double> pts;
    std::vector<std::size_t> direct_q;
    if (any_direct) {
      for (std::size_t iq = 0; iq < nq; ++iq) {
        if (dual_index[iq] < 0 && !out_of_band[iq]) {
          direct_q.push_back(iq);
          pts.insert(pts.end(), mq.begin() + static_cast<long>(iq * n), mq.begin() + static_cast<long>((iq + 1) * n));
        }
      }
    }
    const auto direct = any_direct ? fourier_inverse_at(h, pts) : std::vector<cplx>{};
    std::size_t di = 0;
    for (std::size_t iq = 0; iq < nq; ++iq) {
      cplx v;
      if (out_of_band[iq]) {
        out[iq * np + ip] = 0.0;
        continue;
      }
      if (dual_index[iq] >= 0) {
        v = H[static_cast<std::size_t>(dual_index[iq])];
      } else {
        v = direct[di++];
      }
      double ph = 0.0;
      for (std::size_t a = 0; a < n; ++a) ph += 0.5 * mq[iq * n + a] * p[a];
      out[iq * np + ip] = v * cplx(std::cos(ph), std::sin(ph));
    }
  }
  return out;
}

Field special_hermite(const MultiIndex& gamma, const MultiIndex& eta, const GridSpec& qp) {
  const GridSpec xg = position_grid(qp);
  const std::size_t n = xg.rank();
  return fourier_wigner_general(phi_gamma(gamma, xg), phi_gamma(eta, xg),
                                Eigen::MatrixXd::Identity(static_cast<long>(n), static_cast<long>(n)), qp);
}

}  // namespace rhg
