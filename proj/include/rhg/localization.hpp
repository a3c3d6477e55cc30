#pragma once

// Localization operators with the Gaussian wavelet, their k-Weyl symbols,
// the Gaussian-weighted product convolution and the W_c^k ladder test.

#include <string>
#include <vector>

#include "rhg/algebra.hpp"
#include "rhg/fields.hpp"
#include "rhg/rep_fourier.hpp"
#include "rhg/weyl_k.hpp"

namespace rhg {

/// phi(x) = 2^{n/4} e^{-|x|^2/2}. Its squared norm is (2 pi)^{n/2}.
struct WaveletConfig {
  GridSpec xgrid;
  Field phi;
  double norm_sq = 0.0;

  static WaveletConfig gaussian(const GridSpec& xgrid);
  double value(std::span<const double> x) const;
  /// c_phi = int_G |<phi, pi_k phi>|^2 dmu / ||phi||^2 by quadrature.
  double c_phi(const FreqIndex& k, const OrthFamily& family) const;
  /// (2 pi)^{m+n} ||k||^{-n} ||phi||^2.
  double c_phi_closed(const FreqIndex& k, const OrthFamily& family) const;
};

/// (L f)(x) = (2 pi)^m / c_phi int F(q, p) <f, pi_k(q, p) phi> pi_k(q, p) phi(x) dq dp
/// with F on its own (q, p) grid.
Field localize(const Field& F, const FreqIndex& k, const Field& f, const OrthFamily& family,
               const WaveletConfig& wavelet);
KernelOp localization_kernel(const Field& F, const FreqIndex& k, const OrthFamily& family,
                             const WaveletConfig& wavelet);

/// Closed form of the transform of f_{k,x}(q, p) = <f, pi_k phi> pi_k phi(x)
/// on the (xi, eta) grid.
Field lemma_kernel_ft(const Field& f, const FreqIndex& k, std::span<const double> x,
                      const GridSpec& grid, const OrthFamily& family);

/// F^k(q, p) = F(B p / ||k||^2, -B^t q / ||k||^2) resampled on the grid of F.
Field reindex_symbol(const Field& F, const FreqIndex& k, const OrthFamily& family);
/// Inverse of reindex_symbol: H(a, b) = H^k(-B b, B^t a) sampled on target.
Field unreindex_symbol(const Field& Hk, const FreqIndex& k, const OrthFamily& family,
                       const GridSpec& target);

/// hat F^k(q, p) = ||k||^{2n} hat F(B p, -B^t q) on a (q, p) grid, from the
/// samples of F by direct exponential sums.
Field reindexed_hat(const Field& F, const FreqIndex& k, const GridSpec& qp, const OrthFamily& family);

struct LambdaSymbol {
  Field lambda;      // 2^n / det B e^{-|q|^2/||k||^2 - |p|^2} on the grid
  Field lambda_hat;  // e^{-||k||^2 |q|^2/4 - |p|^2/4} on the dual grid
};
LambdaSymbol lambda_symbol(const FreqIndex& k, const GridSpec& grid, const OrthFamily& family);

/// sigma-hat = hat F^k hat Lambda^k on phase_grid(xgrid, ||k||): the symbol
/// with L_F = W_sigma. The finer q spacing keeps B_k (x + y) / 2 in band.
Field localization_symbol_hat(const Field& F, const FreqIndex& k, const GridSpec& xgrid,
                              const OrthFamily& family);

/// ||L_F f - W_{F^k * Lambda^k} f|| / ||f||.
GapReport loc_as_weyl_gap(const Field& F, const FreqIndex& k, const Field& f, const OrthFamily& family,
                          const WaveletConfig& wavelet);

/// (F (*) G)(xi, eta): twisted convolution with the Gaussian weight.
Field new_conv(const Field& Fhat, const Field& Ghat, const FreqIndex& k, const OrthFamily& family);

struct ProductSymbol {
  Field H_hat_k;  // (2 pi)^{-n} hat F^k (*) hat G^k on phase_grid(xgrid, ||k||)
  Field H;        // back on the grid of F
};
ProductSymbol product_symbol(const Field& F, const Field& G, const FreqIndex& k, const GridSpec& xgrid,
                             const OrthFamily& family);

/// ||L_F(L_G f) - L_H f|| / ||f||.
GapReport product_symbol_gap(const Field& F, const Field& G, const FreqIndex& k, const Field& f,
                             const OrthFamily& family, const WaveletConfig& wavelet);

enum class WcVerdict { Member, Nonmember, Inconclusive };
std::string to_string(WcVerdict v);

struct WcReport {
  double c = 0.0;
  std::vector<double> radii;
  std::vector<double> witness;  // ||e^{c |(B xi, eta)|^2} hat F^k|| on |w|_inf <= radius
  WcVerdict verdict = WcVerdict::Inconclusive;
};

/// Ladder test on hat F^k given on a (xi, eta) grid.
WcReport wclass_test(const Field& Fhat_k, double c, const FreqIndex& k, const OrthFamily& family,
                     const std::vector<double>& radii);

/// c - c eps - 1/4 on 4c/(8c+1) < eps < 1 - 1/(4c).
double c_epsilon(double c, double eps);

}  // namespace rhg
