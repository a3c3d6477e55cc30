#pragma once

// Uniform grids and complex sampled fields over products of real lines and
// circles, with Riemann-sum quadrature and the unitary Fourier transform.

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rhg/error.hpp"

namespace rhg {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class AxisKind { RealLine, Torus };

/// One sampled axis. Real-line nodes are x_j = -L + j (2L/N); torus nodes
/// are t_j = 2 pi j / N.
struct AxisSpec {
  AxisKind kind = AxisKind::RealLine;
  double half_extent = 1.0;  // ignored for torus axes
  int points = 4;

  static AxisSpec real_line(double half_extent, int points);
  static AxisSpec torus(int points);

  double spacing() const;
  double node(int j) const;
  /// Quadrature weight per sample (Lebesgue).
  double weight() const { return spacing(); }
  /// Axis carrying the samples of the unitary transform: spacing pi/L,
  /// half extent N pi / (2L).
  AxisSpec dual() const;
  /// Nearest node index for a coordinate, or -1 when |x - node| > tol * h.
  int lattice_index(double x, double tol = 1e-9) const;

  void validate() const;
  bool operator==(const AxisSpec& other) const;
};

struct GridSpec {
  std::vector<AxisSpec> axes;

  GridSpec() = default;
  explicit GridSpec(std::vector<AxisSpec> a) : axes(std::move(a)) {}

  std::size_t rank() const { return axes.size(); }
  std::size_t size() const;
  std::vector<std::size_t> strides() const;
  std::size_t torus_rank() const;
  std::size_t real_rank() const { return rank() - torus_rank(); }
  /// Lebesgue weight of one cell.
  double cell_weight() const;

  void validate() const;
  bool operator==(const GridSpec& other) const;

  static GridSpec real(int dims, double half_extent, int points);
};

enum class Measure { Lebesgue, Mu };

/// Complex samples in row-major axis order (last axis fastest).
class Field {
 public:
  Field() = default;
  explicit Field(GridSpec grid);
  Field(GridSpec grid, std::vector<cplx> values);

  /// Samples fn at every node; fn receives the node coordinates.
  static Field sample(const GridSpec& grid,
                      const std::function<cplx(std::span<const double>)>& fn);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// Node coordinates of flat index i.
  void coords(std::size_t i, std::span<double> out) const;
  void indices(std::size_t i, std::span<int> out) const;
  std::size_t flat(std::span<const int> idx) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx s);

 private:
  GridSpec grid_;
  std::vector<cplx> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);

cplx integrate(const Field& f, Measure measure = Measure::Lebesgue);
cplx inner(const Field& f, const Field& g, Measure measure = Measure::Lebesgue);
double norm(const Field& f, Measure measure = Measure::Lebesgue);
double max_abs(const Field& f);
double max_abs_diff(const Field& a, const Field& b);
/// ||a - b|| / ||b|| in the given measure (||a - b|| when b vanishes).
double rel_l2(const Field& a, const Field& b, Measure measure = Measure::Lebesgue);

/// Unitary transform (2 pi)^{-d/2} int e^{-i x.xi} f dx along the flagged
/// axes; those axes are replaced by their duals.
Field fourier_forward(const Field& f, const std::vector<bool>& axes);
Field fourier_inverse(const Field& f, const std::vector<bool>& axes);
/// Transform along every axis (all must be real lines).
Field fourier_forward(const Field& f);
Field fourier_inverse(const Field& f);

/// Direct evaluation of the unitary transform of a real-line field at
/// arbitrary frequencies (one frequency vector per row, rank entries each).
std::vector<cplx> fourier_forward_at(const Field& f, std::span<const double> freqs);
std::vector<cplx> fourier_inverse_at(const Field& f_hat, std::span<const double> points);

/// Band-limited (periodic sinc) interpolation of a real-line field at
/// arbitrary points. Points outside the grid box evaluate to zero; that is
/// only accepted when the field is negligible on the box boundary.
std::vector<cplx> interpolate(const Field& f, std::span<const double> points,
                              double edge_tol = 1e-10);

/// f^k(z) = int e^{i k.t} f(z, t) dt / (2 pi)^m over the trailing torus axes.
Field torus_coeff(const Field& f, std::span<const int> k);
/// Torus frequencies whose coefficient has L2 norm above tol * ||f||,
/// excluding k = 0.
std::vector<std::vector<int>> torus_support(const Field& f, double tol = 1e-12);
/// Grid with the torus axes removed.
GridSpec strip_torus(const GridSpec& grid);

// Serialization: little-endian float64 interleaved complex plus a JSON
// sidecar (<path>.json) describing the grid.
void dump_field(const Field& f, const std::filesystem::path& path);
Field load_field(const std::filesystem::path& path);
std::string grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const std::string& text);
/// CSV export of a rank-1 or rank-2 field: coordinate columns, re, im.
void export_csv(const Field& f, const std::filesystem::path& path);

// Used by the translation and representation code: shift samples along real
// axes by whole lattice steps with zero fill.
Field lattice_shift(const Field& f, std::span<const int> steps);
/// Spectral shift g(x) = f(x + s) on the real axes (periodic, unitary).
Field spectral_shift(const Field& f, std::span<const double> shift);

/// max |f| within `width` samples of a real-axis boundary, relative to max |f|.
double boundary_ratio(const Field& f, int width = 2);

/// In-place unnormalized DFT (sign -1) or its conjugate (sign +1).
void dft_inplace(std::vector<cplx>& data, int sign);

}  // namespace rhg
