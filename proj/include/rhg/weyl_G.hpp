#pragma once

// Operator-valued Wigner transform on G, the Moyal identity, Fourier recovery
// and inversion, the Weyl transform W_sigma as a dense kernel on a G grid,
// Schatten estimates, and the divergent quantity behind the unboundedness of
// W_sigma for r > 2.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rhg/algebra.hpp"
#include "rhg/fields.hpp"
#include "rhg/rep_fourier.hpp"

namespace rhg {

/// (2 pi)^{-n} ||k||^n, the Plancherel weight of one frequency.
double alpha_weight(const FreqIndex& k, int n);

/// sigma(q, p, t, k): one kernel per G-grid point and k slot. All kernels
/// share the x grid given by the p axes of the G grid.
struct OperatorSymbolG {
  GridSpec grid;
  std::vector<FreqIndex> ks;
  std::vector<std::vector<KernelOp>> entries;  // [slot][flat grid index]

  static OperatorSymbolG zeros(const GridSpec& grid, std::vector<FreqIndex> ks);
  GridSpec xgrid() const;
};

/// V(f, g)(a, k) = F(f . tau_a g)(k) at one grid point a.
KernelOp wigner_G_at(const Field& f, const Field& g, std::size_t point, const FreqIndex& k,
                     const OrthFamily& family);
OperatorSymbolG wigner_G(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                         const OrthFamily& family);

struct MoyalReport {
  cplx lhs{};  // sum_k int tr[V(f1, g1) V(f2, g2)^*] d(mu x alpha)
  cplx rhs{};  // <f1 - f1^0, f2 - f2^0> <g1, g2>
  double scale = 0.0;  // ||f1|| ||f2|| ||g1|| ||g2||
  double rel_err = 0.0;  // relative to |rhs|, or to scale when rhs vanishes
};
MoyalReport moyal_gap(const Field& f1, const Field& g1, const Field& f2, const Field& g2,
                      const std::vector<FreqIndex>& ks, const OrthFamily& family);

/// ||sigma||_{r, mu x alpha}; r = infinity gives the largest singular value.
double mixed_norm(const OperatorSymbolG& sigma, double r);

struct RecoveryReport {
  cplx C{};  // int_G g dmu
  std::vector<double> rel_err;  // per k: ||C^{-1} int V(f, g)(., k) - Ff(k)||_HS / ||Ff(k)||_HS
  double max_rel_err = 0.0;
};
RecoveryReport ft_recovery_gap(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                               const OrthFamily& family);

/// C^{-1} int_G V(f, g)(a, k) dmu(a) for each k.
FourierTable wigner_fourier_table(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                                  const OrthFamily& family);
/// f - f^0 rebuilt from the Wigner transform.
Field wigner_inversion(const Field& f, const Field& g, const std::vector<FreqIndex>& ks,
                       const OrthFamily& family);

/// Dense kernel of W_sigma on a G grid: (W f)(b) = int K(b, a) f(a) dmu(a).
struct KernelG {
  GridSpec grid;
  Eigen::MatrixXcd values;

  /// mu weight of one sample.
  double weight() const;
  Eigen::MatrixXcd weighted() const { return weight() * values; }
  Field apply(const Field& f) const;
};

inline constexpr std::size_t kMaxKernelPoints = 4096;

/// K(b, a) = sum_k tr[sigma^*(a b, k) pi_k(a)] (2 pi)^{-n} ||k||^n. sigma is
/// read at a b through its torus coefficients and vanishes off the grid.
KernelG weyl_G_kernel(const OperatorSymbolG& sigma, const OrthFamily& family);

/// tau(c, k) = pi_k(c) sigma(c, k)^* for a t-independent sigma; then
/// W_tau = W_sigma^*. Conjugation on G only moves t, which is what makes the
/// formula exact.
OperatorSymbolG adjoint_symbol(const OperatorSymbolG& sigma, const OrthFamily& family);

/// <W_sigma f, conj g> = int (W_sigma f) g dmu.
cplx weyl_G_pairing(const KernelG& K, const Field& f, const Field& g);
/// <V(f, g), sigma>_{mu x alpha} = sum_k int tr[sigma^* V(f, g)] d(mu x alpha).
cplx wigner_symbol_pairing(const Field& f, const Field& g, const OperatorSymbolG& sigma,
                           const OrthFamily& family);

/// Singular values of D^{1/2} K D^{1/2}, descending.
Eigen::VectorXd singular_values(const KernelG& K);

struct SchattenCheck {
  double r = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double rel_err = 0.0;
  bool pass = false;
};
struct SchattenReport {
  SchattenCheck s1;  // ||W_sigma||_{S_1} <= 2^{-2n-m} ||sigma||_1
  SchattenCheck s2;  // ||W_sigma||_{S_2}^2 = ||sigma||_2^2
};
SchattenReport schatten_suite(const OperatorSymbolG& sigma, const OrthFamily& family,
                              double s2_tol = 1e-3);

/// Seeded single-k symbol c(q, p) e^{i j t} (u x conj v) with Gaussian c,
/// u, v; k has norm 1 or 2 and the grid is group_grid_for at scale ||k||.
OperatorSymbolG random_single_k_symbol(std::uint64_t seed, const OrthFamily& family, int points = 20,
                                       double half_extent = 5.0, int torus_points = 4);

/// f_alpha = prod |t|^alpha |q|^alpha |p|^alpha on |q|, |p| <= 1 as cell
/// averages on the grid, so the nodes on the singular axes stay finite.
Field f_alpha_sample(double alpha, const GridSpec& grid, const OrthFamily& family);
/// ||f_alpha||_mu^2 by graded-mesh quadrature of the one-dimensional factors.
double f_alpha_norm_sq(double alpha, int n, int m);

/// int_0^T t^alpha phi(t) dt on the mesh T (j/P)^2. The first cell is done
/// by the power series of phi, given as its Taylor coefficients.
cplx graded_power_integral(double alpha, double T, const std::function<cplx(double)>& phi,
                           const std::vector<cplx>& taylor, int panels = 400);

struct GaussianME {
  std::vector<cplx> t_factor;  // int_0^{2 pi} t^alpha e^{i k_j t} dt / (2 pi), per component
  double q_factor = 0.0;       // int_{-1}^{1} |q|^alpha e^{-||k|| q^2 / 4} dq
  double q_gamma_limit = 0.0;  // (2 / sqrt||k||)^{alpha+1} Gamma((alpha+1)/2)

  /// <F f_alpha(k) Phi_0^k, Phi_0^k> = prod t_factor * q_factor^{2n}.
  cplx value(int n) const;
  /// Same with the extra (2 pi)^{-n/2} of the separable display.
  cplx value_with_extra_constant(int n) const;
};
GaussianME gaussian_me_1d(const FreqIndex& k, double alpha);

struct DivergenceRow {
  int K = 0;
  double S = 0.0;
  double increment = 0.0;  // S(K) - S(K/2)
  double log_slope = 0.0;  // increment / log 2
};
struct DivergenceReport {
  double alpha = 0.0;
  double r_prime = 0.0;
  int n = 0;
  int m = 0;
  double exponent = 0.0;  // (m+n)(alpha+1) r' - n; divergent iff <= m
  std::vector<double> S;  // S(1), ..., S(K_max)
  std::vector<DivergenceRow> ladder;  // K = 1, 2, 4, ...
  bool strictly_increasing = false;
  double fit_slope = 0.0;  // S against log K over the ladder
  double fit_r2 = 0.0;
};
/// S(K) = sum_{0 < k_j <= K} |<F f_alpha(k) Phi_0^k, Phi_0^k>|^{r'} (2 pi)^{-n} ||k||^n.
DivergenceReport divergence_partial_sums(double alpha, double r_prime, int K_max,
                                         const OrthFamily& family);
std::string divergence_csv(const DivergenceReport& report);

/// Least-squares fit y = a + b x; returns {b, R^2}.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rhg
