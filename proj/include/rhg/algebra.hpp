#pragma once

// Anticommuting orthogonal families B_1..B_m, the bracket, and the group law
// on R^n x R^n x T^m.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rhg/fields.hpp"

namespace rhg {

struct OrthFamily {
  int n = 0;
  int m = 0;
  std::vector<Eigen::MatrixXd> B;

  /// Checks B_j B_j^t = I and B_j^t B_k + B_k^t B_j = 0 (j != k) entrywise.
  void validate(double tol = 1e-12) const;
};

/// Nonzero integer frequency on the m-torus.
struct FreqIndex {
  std::vector<int> k;

  FreqIndex() = default;
  explicit FreqIndex(std::vector<int> values);
  std::size_t size() const { return k.size(); }
  double norm() const;
  std::vector<double> as_real() const { return {k.begin(), k.end()}; }
};

/// Left multiplications by the imaginary units of the Cayley-Dickson algebra
/// of dimension 2^s (s <= 3) with B_1 = I, tensored with the identity on the
/// odd part of n.
OrthFamily build_family(int n, int m);
/// "hr-1-1", "hr-2-2", "hr-4-4" or "hr-8-8".
OrthFamily family_preset(const std::string& name);
/// Plain text: whitespace-separated row-major matrices, blank line between
/// blocks. Validated after parsing.
OrthFamily load_family(const std::filesystem::path& path);
std::string family_to_text(const OrthFamily& family);

/// B_lambda = sum_j lambda_j B_j.
Eigen::MatrixXd assemble_B(const OrthFamily& family, std::span<const double> lambda);
Eigen::MatrixXd assemble_B(const OrthFamily& family, const FreqIndex& k);

/// [z, z']_j = x'.B_j y - x.B_j y' with z = (x, y).
std::vector<double> bracket(std::span<const double> z, std::span<const double> zp,
                            const OrthFamily& family);

struct GroupElement {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> t;  // reduced to [0, 2 pi)

  GroupElement() = default;
  GroupElement(std::vector<double> q_, std::vector<double> p_, std::vector<double> t_);
  static GroupElement identity(int n, int m);

  std::vector<double> z() const;
};

double wrap_angle(double t);

GroupElement multiply(const GroupElement& a, const GroupElement& b, const OrthFamily& family);
GroupElement inverse(const GroupElement& a);

/// (tau_a g)(x) = g(a^{-1} * x) for a field on a G-grid (real axes q then p,
/// then the torus axes). The (q, p) part of a must sit on the grid lattice
/// unless spectral is set; the t-dependence is shifted by trigonometric
/// interpolation.
Field translate(const Field& g, const GroupElement& a, const OrthFamily& family,
                bool spectral = false);

/// Grid for functions on G: n q-axes, n p-axes (all real lines), m torus axes.
GridSpec group_grid(int n, int m, double half_extent, int points, int torus_points);

}  // namespace rhg
