#pragma once

// Hermite functions, Laguerre polynomials, the k-scaled Hermite states and
// special Hermite functions.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rhg/fields.hpp"

namespace rhg {

using MultiIndex = std::vector<int>;

inline constexpr int kMaxDegree = 32;

/// Normalized Hermite function h_k at the given points.
std::vector<double> hermite_values(int k, std::span<const double> x);
/// h_k sampled on a one-dimensional real-line grid.
Field hermite_h(int k, const GridSpec& grid);

/// Generalized Laguerre polynomial L_k^alpha at the given points.
std::vector<double> laguerre(int k, double alpha, std::span<const double> x);

/// Phi_gamma(x) = prod_j h_{gamma_j}(x_j).
Field phi_gamma(const MultiIndex& gamma, const GridSpec& grid);
/// ||k||^{n/4} Phi_gamma(sqrt(||k||) x).
Field phi_gamma_k(const MultiIndex& gamma, double knorm, const GridSpec& grid);

/// (2 pi)^{-n/2} int e^{i (M q).(x + p/2)} f(x + p) conj(g(x)) dx on a (q, p)
/// grid. The p axes must share the spacing of the x grid and sit on its
/// lattice; q axes are arbitrary.
Field fourier_wigner_general(const Field& f, const Field& g, const Eigen::MatrixXd& M,
                             const GridSpec& qp);

/// Phi_{gamma eta} = V(Phi_gamma, Phi_eta) on a (q, p) grid; the x grid is
/// taken from the p axes.
Field special_hermite(const MultiIndex& gamma, const MultiIndex& eta, const GridSpec& qp);

/// x grid induced by the p axes of a rank-2n (q, p) grid.
GridSpec position_grid(const GridSpec& qp);

}  // namespace rhg
