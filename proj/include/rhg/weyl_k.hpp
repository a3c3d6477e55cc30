#pragma once

// k-Fourier-Wigner and k-Wigner transforms, the k-Weyl transform and the
// k-twisted convolution.

#include "rhg/algebra.hpp"
#include "rhg/fields.hpp"
#include "rhg/rep_fourier.hpp"

namespace rhg {

/// V_k(f, g)(q, p) = (2 pi)^{-n/2} <pi_k(q, p) f, g> on a (q, p) grid whose
/// p axes equal the grid of f and g.
Field fourier_wigner_k(const Field& f, const Field& g, const FreqIndex& k, const OrthFamily& family,
                       const GridSpec& qp);

/// Grid carrying sigma(x, xi) whose transform lives on qp.
GridSpec symbol_grid(const GridSpec& qp);

/// W^k(f, g) = hat V_k(f, g), on symbol_grid(qp).
Field wigner_k(const Field& f, const Field& g, const FreqIndex& k, const OrthFamily& family,
               const GridSpec& qp);

/// Kernel of W^k_sigma from sigma-hat on a phase grid:
/// (2 pi)^{-n} int hat sigma(q, p) pi_k(q, p) dq dp.
KernelOp weyl_k_kernel_hat(const Field& sigma_hat, const FreqIndex& k, const OrthFamily& family);
KernelOp weyl_k_kernel(const Field& sigma, const FreqIndex& k, const OrthFamily& family);

Field weyl_k_apply_hat(const Field& sigma_hat, const FreqIndex& k, const Field& f,
                       const OrthFamily& family);
Field weyl_k_apply(const Field& sigma, const FreqIndex& k, const Field& f, const OrthFamily& family);

/// <W^k_sigma f, g> through the pairing (2 pi)^{-n/2} int sigma W^k(f, g).
cplx weyl_k_pairing(const Field& sigma, const FreqIndex& k, const Field& f, const Field& g,
                    const OrthFamily& family);

/// (F *_k G)(w) = int F(w - z) G(z) e^{(i/2) k.[w, z]} dz by direct double sum.
Field twisted_conv(const Field& F, const Field& G, const FreqIndex& k, const OrthFamily& family);

/// Twisted convolution with the extra weight
/// exp(gauss (eta.p + ||k||^2 xi.q - |p|^2 - ||k||^2 |q|^2) / 2) at w = (xi, eta), z = (q, p).
/// gauss = 0 is twisted_conv, gauss = 1 the Gaussian-weighted product of
/// localization symbols.
Field gaussian_twisted_conv(const Field& F, const Field& G, const FreqIndex& k,
                            const OrthFamily& family, double gauss);

struct GapReport {
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  double gap = 0.0;  // ||lhs - rhs|| / ||f||
};

/// Compares W_sigma(W_tau f) with W_gamma f, gamma-hat = (2 pi)^{-n} sigma-hat *_k tau-hat.
GapReport weyl_product_gap(const Field& sigma_hat, const Field& tau_hat, const FreqIndex& k,
                           const Field& f, const OrthFamily& family);

/// ||A - A^*||_F / ||A||_F for the weighted kernel matrix.
double self_adjoint_residual(const KernelOp& op);

}  // namespace rhg
