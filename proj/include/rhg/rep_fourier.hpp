#pragma once

// Schroedinger representations pi_k on L^2(R^n), the group Fourier transform
// as a Hilbert-Schmidt kernel, Plancherel and inversion.

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "rhg/algebra.hpp"
#include "rhg/fields.hpp"

namespace rhg {

/// Integral kernel N(x_i, y_j) on an R^n grid; (N phi)(x) = int N(x, y) phi(y) dy.
struct KernelOp {
  GridSpec xgrid;
  Eigen::MatrixXcd values;

  KernelOp() = default;
  explicit KernelOp(GridSpec grid);
  KernelOp(GridSpec grid, Eigen::MatrixXcd v);

  /// Quadrature weight of one x sample.
  double weight() const { return xgrid.cell_weight(); }
  /// D^{1/2} N D^{1/2}: the matrix unitarily equivalent to the operator.
  Eigen::MatrixXcd weighted() const { return weight() * values; }
  Field apply(const Field& phi) const;
  double hs_norm() const;

  /// Field over the rank-2n grid (x, y).
  Field as_field() const;
  static KernelOp from_field(const Field& f);
};

/// pi_k(q,p,t) phi(x) = e^{i k.t} e^{i q.B_k(x + p/2)} phi(x + p). Lattice
/// shifts are exact; other shifts use the spectral shift.
Field apply_rep(const FreqIndex& k, const GroupElement& a, const Field& phi,
                const OrthFamily& family);
/// <phi, pi_k(a) psi>.
cplx matrix_element(const FreqIndex& k, const GroupElement& a, const Field& phi,
                    const Field& psi, const OrthFamily& family);

/// (q, p) grid whose p axes equal the x axes and whose q axes are the dual
/// x axes scaled by 1/scale.
GridSpec phase_grid(const GridSpec& xgrid, double scale = 1.0);
/// G grid built on phase_grid(xgrid, scale) with m torus axes. Inversion is
/// exact for |k| up to scale (coarser q spacing aliases the trace sums).
GridSpec group_grid_for(const GridSpec& xgrid, int m, int torus_points, double scale = 1.0);

struct AdmissibilityResult {
  double integral = 0.0;  // int_G |<phi, pi_k phi>|^2 dq dp dt
  double constant = 0.0;  // integral / ||phi||^4
  double expected = 0.0;  // |det B_k|^{-1} (2 pi)^{m+n}
  double tail = 0.0;      // boundary share of the integral
};

/// Square integrability constant by quadrature over [0, 2 pi]^m times a
/// truncated R^{2n} (q extent shrunk by ||k||).
AdmissibilityResult admissibility_constant(const FreqIndex& k, const Field& phi,
                                           const OrthFamily& family, int torus_points = 4);

/// Ff(k) = int_G f pi_k dmu for f on a G grid (q axes, p axes, torus axes).
/// The p axes double as the x grid of the kernel.
KernelOp gft(const Field& f, const FreqIndex& k, const OrthFamily& family);
/// Same from the torus coefficient f^k on the (q, p) grid.
KernelOp gft_coeff(const Field& fk, const FreqIndex& k, const OrthFamily& family);

double hs_norm(const KernelOp& op);

/// T(q, p) = tr(pi_k(q, p, 0)^* N) on a (q, p) grid whose p axes match N.
Field trace_table(const KernelOp& op, const FreqIndex& k, const GridSpec& qp,
                  const OrthFamily& family);
/// tr(pi_k(a)^* N) for one group element with lattice (q, p) shift.
cplx trace_rep(const KernelOp& op, const FreqIndex& k, const GroupElement& a,
               const OrthFamily& family);

struct FourierSlot {
  FreqIndex k;
  KernelOp op;
};
using FourierTable = std::vector<FourierSlot>;

/// Nonzero torus frequencies present in f.
std::vector<FreqIndex> t_spectrum(const Field& f, double tol = 1e-12);
FourierTable fourier_table(const Field& f, const OrthFamily& family,
                           const std::vector<FreqIndex>& ks);

struct PlancherelReport {
  double lhs = 0.0;  // sum_k ||Ff(k)||_HS^2 (2 pi)^{-n} ||k||^n
  double rhs = 0.0;  // ||f - f^0||^2_mu
  double rel_err = 0.0;
  double lhs_augmented = 0.0;  // lhs + int |hat f^0|^2
  double rhs_augmented = 0.0;  // ||f||^2_mu
  double rel_err_augmented = 0.0;
};
PlancherelReport plancherel_gap(const Field& f, const OrthFamily& family,
                                const std::vector<FreqIndex>& ks);
PlancherelReport plancherel_gap(const Field& f, const OrthFamily& family);

/// f = sum_k tr(pi_k^* Ff(k)) (2 pi)^{-n} ||k||^n + f^0 on the G grid built
/// from the (q, p) grid of f0 and the given torus axes.
Field invert(const FourierTable& table, const Field& f0, const OrthFamily& family,
             int torus_points);

/// One binary kernel file per k plus manifest.json {k, norm, grid}.
void save_table(const FourierTable& table, const std::filesystem::path& dir);
FourierTable load_table(const std::filesystem::path& dir);

}  // namespace rhg
