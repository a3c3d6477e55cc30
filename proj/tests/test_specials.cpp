#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rhg/specials.hpp"

using namespace rhg;

namespace {

double binom(double a, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= (a - k + i) / i;
  return r;
}

// Explicit sum L_k^a(x) = sum_i (-1)^i C(k + a, k - i) x^i / i!.
double laguerre_sum(int k, double a, double x) {
  double s = 0.0, fact = 1.0;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) fact *= i;
    s += (i % 2 ? -1.0 : 1.0) * binom(k + a, k - i) * std::pow(x, i) / fact;
  }
  return s;
}

// (-d^2/dx^2 + x^2) f via the spectral second derivative.
Field harmonic_oscillator(const Field& f) {
  Field F = fourier_forward(f);
  std::vector<double> xi(f.grid().rank());
  for (std::size_t i = 0; i < F.size(); ++i) {
    F.coords(i, xi);
    double s = 0.0;
    for (double v : xi) s += v * v;
    F[i] *= s;
  }
  Field out = fourier_inverse(F);
  std::vector<double> x(f.grid().rank());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords(i, x);
    double s = 0.0;
    for (double v : x) s += v * v;
    out[i] += s * f[i];
  }
  return out;
}

// L = sqrt(N pi / 2) makes the dual of the axis equal to itself.
AxisSpec self_dual_axis(int n) { return AxisSpec::real_line(std::sqrt(n * M_PI / 2.0), n); }

}  // namespace

TEST_CASE("hermite functions") {
  const auto grid = GridSpec::real(1, 10.0, 512);
  const auto h0 = hermite_h(0, grid);
  for (int j = 0; j < 512; j += 37) {
    const double x = grid.axes[0].node(j);
    CHECK(std::abs(h0[static_cast<std::size_t>(j)] - std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x)) < 1e-15);
  }
  double worst = 0.0;
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; b <= 8; ++b) {
      const double ip = inner(hermite_h(a, grid), hermite_h(b, grid)).real();
      worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-9);
  const auto g = GridSpec::real(1, 12.0, 256);
  for (int k = 0; k <= 10; ++k) {
    const auto h = hermite_h(k, g);
    const auto Hh = harmonic_oscillator(h);
    CHECK(max_abs_diff(Hh, (2.0 * k + 1.0) * h) < 1e-6);
  }
  const std::vector<double> x{0.3};
  CHECK_THROWS_AS(hermite_values(-1, x), Error);
  CHECK_NOTHROW(hermite_values(32, x));
}

TEST_CASE("laguerre polynomials") {
  std::vector<double> x;
  for (int i = 0; i < 40; ++i) x.push_back(0.25 * i);
  const auto l0 = laguerre(0, 0.7, x);
  const auto l1 = laguerre(1, 0.0, x);
  const auto l3 = laguerre(3, 0.0, x);
  const auto l5 = laguerre(5, 1.5, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(l0[i] == 1.0);
    CHECK(std::abs(l1[i] - (1.0 - x[i])) < 1e-14);
    CHECK(std::abs(l3[i] - laguerre_sum(3, 0.0, x[i])) < 1e-8);
    CHECK(std::abs(l5[i] - laguerre_sum(5, 1.5, x[i])) < 1e-8 * (1.0 + std::abs(l5[i])));
  }
  CHECK_THROWS_AS(laguerre(2, -1.0, x), Error);
  CHECK_THROWS_AS(laguerre(-1, 0.0, x), Error);
}

TEST_CASE("multi-dimensional Hermite states") {
  const auto grid = GridSpec::real(2, 9.0, 64);
  const std::vector<MultiIndex> gammas{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2},
                                       {3, 0}, {2, 1}, {1, 2}, {0, 3}};
  double worst = 0.0;
  for (const auto& a : gammas) {
    for (const auto& b : gammas) {
      const double ip = std::abs(inner(phi_gamma(a, grid), phi_gamma(b, grid)));
      worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-9);
  const auto p0 = phi_gamma({0, 0}, grid);
  std::vector<double> x(2);
  for (std::size_t i = 0; i < p0.size(); i += 97) {
    p0.coords(i, x);
    CHECK(std::abs(p0[i] - std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) / std::sqrt(M_PI)) < 1e-15);
  }
  const auto p21 = phi_gamma({2, 1}, grid);
  CHECK(max_abs_diff(harmonic_oscillator(p21), 8.0 * p21) < 1e-6);
}

TEST_CASE("k-scaled Hermite states") {
  const auto grid = GridSpec::real(1, 10.0, 256);
  CHECK(max_abs_diff(phi_gamma_k({3}, 1.0, grid), phi_gamma({3}, grid)) == 0.0);
  const auto s = phi_gamma_k({2}, 5.0, grid);
  CHECK(norm(s) == doctest::Approx(1.0).epsilon(1e-9));
  for (int j = 0; j < 256; j += 17) {
    const double x = grid.axes[0].node(j);
    const double y = std::sqrt(5.0) * x;
    const double h2 = std::pow(M_PI, -0.25) * (2.0 * y * y - 1.0) / std::sqrt(2.0) * std::exp(-0.5 * y * y);
    CHECK(std::abs(s[static_cast<std::size_t>(j)] - std::pow(5.0, 0.25) * h2) < 1e-13);
  }
}

TEST_CASE("special Hermite functions") {
  const auto ax = self_dual_axis(64);
  const GridSpec qp({ax, ax});
  const auto s00 = special_hermite({0}, {0}, qp);
  CHECK(norm(s00) == doctest::Approx(1.0).epsilon(1e-8));
  const auto s11 = special_hermite({1}, {1}, qp);
  const auto s01 = special_hermite({0}, {1}, qp);
  const auto s10 = special_hermite({1}, {0}, qp);
  const auto s22 = special_hermite({2}, {2}, qp);
  double e00 = 0.0, e11 = 0.0;
  std::vector<double> z(2);
  for (std::size_t i = 0; i < s00.size(); ++i) {
    s00.coords(i, z);
    const double r2 = z[0] * z[0] + z[1] * z[1];
    const double g = std::exp(-r2 / 4.0) / std::sqrt(2.0 * M_PI);
    e00 = std::max(e00, std::abs(s00[i] - g));
    e11 = std::max(e11, std::abs(s11[i] - (1.0 - r2 / 2.0) * g));
  }
  CHECK(e00 < 1e-10);
  CHECK(e11 < 1e-7);
  const std::vector<const Field*> fam{&s00, &s01, &s10, &s11, &s22};
  double worst = 0.0;
  for (std::size_t a = 0; a < fam.size(); ++a) {
    for (std::size_t b = 0; b < fam.size(); ++b) {
      worst = std::max(worst, std::abs(std::abs(inner(*fam[a], *fam[b])) - (a == b ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-7);

  // Off-lattice q axis takes the direct path and must agree with the closed form.
  const GridSpec qp2({AxisSpec::real_line(5.0, 20), ax});
  const auto d00 = special_hermite({0}, {0}, qp2);
  double ed = 0.0;
  for (std::size_t i = 0; i < d00.size(); ++i) {
    d00.coords(i, z);
    const double r2 = z[0] * z[0] + z[1] * z[1];
    ed = std::max(ed, std::abs(d00[i] - std::exp(-r2 / 4.0) / std::sqrt(2.0 * M_PI)));
  }
  CHECK(ed < 1e-10);
}
