#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rhg/error.hpp"
#include "rhg/weyl_G.hpp"

using namespace rhg;

namespace {

const OrthFamily& fam1() {
  static const OrthFamily f = build_family(1, 1);
  return f;
}

const std::vector<FreqIndex>& pm1() {
  static const std::vector<FreqIndex> ks{FreqIndex({1}), FreqIndex({-1})};
  return ks;
}

GridSpec moyal_grid() { return group_grid_for(GridSpec::real(1, 6.0, 24), 1, 4, 1.0); }

// Gaussian in (q, p) times c1 e^{it} + cm1 e^{-it} + c0.
Field bump(const GridSpec& g, double a, double b, double w, cplx c1, cplx cm1, cplx c0) {
  return Field::sample(g, [=](std::span<const double> x) {
    const double r = (x[0] - a) * (x[0] - a) + (x[1] - b) * (x[1] - b);
    return std::exp(-r / (2 * w * w)) * (c1 * std::polar(1.0, x[2]) + cm1 * std::polar(1.0, -x[2]) + c0);
  });
}

Field drop_zero_mode(const Field& f) {
  Field out = f;
  const auto f0 = torus_coeff(f, std::vector<int>{0});
  const auto nt = static_cast<std::size_t>(f.grid().axes.back().points);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= f0[i / nt];
  return out;
}

// c(q, p) (u x conj v), t-independent, on a G grid at scale |k|.
OperatorSymbolG rank_one_symbol(int kk, double pwidth, double tfreq) {
  const auto xg = GridSpec::real(1, 5.0, 16);
  const auto g = group_grid_for(xg, 1, 4, std::abs(kk));
  const auto u = Field::sample(xg, [](std::span<const double> x) {
    return cplx(std::exp(-(x[0] - 0.3) * (x[0] - 0.3) / 2));
  });
  const auto v = Field::sample(xg, [](std::span<const double> x) {
    return std::exp(-(x[0] + 0.2) * (x[0] + 0.2) / 1.5) * std::polar(1.0, 0.4 * x[0]);
  });
  auto sigma = OperatorSymbolG::zeros(g, {FreqIndex({kk})});
  std::vector<double> c(3);
  const Field tmp(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    tmp.coords(i, c);
    const cplx amp = std::exp(-((c[0] - 0.2) * (c[0] - 0.2) / 0.5 + (c[1] + 0.1) * (c[1] + 0.1) / pwidth)) *
                     cplx(1.0, 0.3) * std::polar(1.0, tfreq * c[2]);
    for (int a = 0; a < 16; ++a)
      for (int b = 0; b < 16; ++b) sigma.entries[0][i].values(a, b) = amp * u[a] * std::conj(v[b]);
  }
  return sigma;
}

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("alpha weight") {
  CHECK(alpha_weight(FreqIndex({3}), 1) == doctest::Approx(3.0 / (2 * kPi)).epsilon(1e-14));
  CHECK(alpha_weight(FreqIndex({3, 4}), 2) == doctest::Approx(25.0 / (4 * kPi * kPi)).epsilon(1e-14));
}

TEST_CASE("Wigner transform of zero and oversized inputs") {
  const auto g = moyal_grid();
  const auto f = bump(g, 0.3, -0.2, 0.75, 1.0, 0.5, 0.2);
  const auto w = wigner_G(f, Field(g), pm1(), fam1());
  for (const auto& slot : w.entries)
    for (const auto& op : slot) CHECK(op.values.isZero(0.0));
  const auto wide = bump(g, 0.0, 0.0, 3.0, 1.0, 0.0, 0.0);
  CHECK(code_of([&] { moyal_gap(wide, f, wide, f, pm1(), fam1()); }) == ErrorCode::SupportOverflow);
}

TEST_CASE("Moyal identity") {
  const auto g = moyal_grid();
  const auto f1 = bump(g, 0.3, -0.2, 0.75, 1.0, 0.5, 0.2);
  const auto f2 = bump(g, -0.1, 0.4, 0.7, cplx(0.3, 0.7), 1.0, -0.4);
  const auto g1 = bump(g, 0.2, 0.1, 0.7, 0.0, 0.0, 1.0);
  const auto g2 = bump(g, -0.3, 0.2, 0.75, 0.0, 0.0, cplx(1.0, 0.5));

  const auto r = moyal_gap(f1, g1, f2, g2, pm1(), fam1());
  CHECK(std::abs(r.rhs) > 1e-3 * r.scale);
  CHECK(r.rel_err <= 1e-4);

  // Oracle for the right side, straight from the samples.
  const cplx rhs = inner(drop_zero_mode(f1), drop_zero_mode(f2), Measure::Mu) * inner(g1, g2, Measure::Mu);
  CHECK(std::abs(r.rhs - rhs) <= 1e-12 * std::abs(rhs));

  SUBCASE("orthogonal windows") {
    const auto odd = Field::sample(g, [](std::span<const double> x) {
      return cplx(x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2 * 0.7 * 0.7)));
    });
    const auto even = bump(g, 0.0, 0.0, 0.7, 0.0, 0.0, 1.0);
    const auto q = moyal_gap(f1, even, f2, odd, pm1(), fam1());
    CHECK(std::abs(q.rhs) <= 1e-12 * q.scale);
    CHECK(q.rel_err <= 1e-4);
  }

  SUBCASE("t-independent f2") {
    const auto flat = bump(g, 0.1, 0.0, 0.7, 0.0, 0.0, 1.0);
    const auto q = moyal_gap(f1, g1, flat, g2, pm1(), fam1());
    CHECK(std::abs(q.rhs) <= 1e-12 * q.scale);
    CHECK(std::abs(q.lhs) <= 1e-6 * q.scale);
  }
}

TEST_CASE("Fourier recovery and Wigner inversion") {
  const auto g = moyal_grid();
  const auto f = bump(g, 0.3, -0.2, 0.75, 1.0, 0.5, 0.2);
  const auto gt = bump(g, 0.2, 0.1, 0.7, 0.3, 0.0, 1.0);

  const auto rec = ft_recovery_gap(f, gt, pm1(), fam1());
  REQUIRE(rec.rel_err.size() == 2);
  CHECK(rec.max_rel_err <= 1e-4);
  CHECK(std::abs(rec.C - integrate(gt, Measure::Mu)) <= 1e-14 * std::abs(rec.C));

  const auto target = drop_zero_mode(f);
  CHECK(rel_l2(wigner_inversion(f, gt, pm1(), fam1()), target) <= 1e-4);
  const Field g2 = cplx(2.0) * gt;
  CHECK(rel_l2(wigner_inversion(f, g2, pm1(), fam1()), wigner_inversion(f, gt, pm1(), fam1())) <= 1e-12);

  const auto flat = bump(g, 0.1, 0.0, 0.7, 0.0, 0.0, 1.0);
  CHECK(max_abs(wigner_inversion(flat, gt, pm1(), fam1())) <= 1e-10);

  // int g dmu = 0 when g has no zero mode.
  const auto nozero = bump(g, 0.2, 0.1, 0.7, 1.0, 0.0, 0.0);
  CHECK(code_of([&] { ft_recovery_gap(f, nozero, pm1(), fam1()); }) == ErrorCode::ZeroC);
}

TEST_CASE("mixed norms") {
  const auto sigma = rank_one_symbol(1, 0.7, 1.0);
  CHECK(mixed_norm(OperatorSymbolG::zeros(sigma.grid, sigma.ks), 2.0) == 0.0);

  const Field tmp(sigma.grid);
  const double w = sigma.grid.cell_weight() / (2 * kPi);
  const double a = alpha_weight(sigma.ks[0], 1);
  double fro = 0.0, top = 0.0;
  for (const auto& op : sigma.entries[0]) {
    fro += w * a * op.weighted().squaredNorm();
    if (!op.values.isZero(0.0)) {
      top = std::max(top, Eigen::JacobiSVD<Eigen::MatrixXcd>(op.weighted()).singularValues()[0]);
    }
  }
  CHECK(mixed_norm(sigma, 2.0) == doctest::Approx(std::sqrt(fro)).epsilon(1e-12));
  CHECK(mixed_norm(sigma, std::numeric_limits<double>::infinity()) == doctest::Approx(top).epsilon(1e-12));
  CHECK(code_of([&] { mixed_norm(sigma, 0.5); }) == ErrorCode::BadExponent);
}

TEST_CASE("Weyl kernel on G") {
  const auto sigma = rank_one_symbol(1, 0.7, 1.0);
  const auto& g = sigma.grid;

  CHECK(weyl_G_kernel(OperatorSymbolG::zeros(g, sigma.ks), fam1()).values.isZero(0.0));

  const auto big = group_grid_for(GridSpec::real(1, 5.0, 40), 1, 4, 1.0);
  CHECK(code_of([&] { weyl_G_kernel(OperatorSymbolG::zeros(big, {FreqIndex({1})}), fam1()); }) ==
        ErrorCode::KernelTooLarge);

  SUBCASE("pairing against the Wigner transform") {
    const auto K = weyl_G_kernel(sigma, fam1());
    const auto f = bump(g, 0.3, -0.2, 0.55, 1.0, 0.0, 0.3);
    const auto h = bump(g, -0.2, 0.1, 0.55, cplx(0.5, 0.2), 0.0, 1.0);
    const cplx lhs = weyl_G_pairing(K, f, h);
    const cplx rhs = wigner_symbol_pairing(f, h, sigma, fam1());
    CHECK(std::abs(rhs) > 0.0);
    CHECK(std::abs(lhs - rhs) <= 1e-4 * std::abs(rhs));
  }

  SUBCASE("t structure for a t-independent symbol") {
    const auto s0 = rank_one_symbol(1, 0.7, 0.0);
    const auto K = weyl_G_kernel(s0, fam1());
    const int nt = g.axes.back().points;
    const cplx step = std::polar(1.0, kTwoPi / nt);
    double resid = 0.0;
    for (long b = 0; b < K.values.rows(); ++b) {
      const long b0 = b - b % nt;
      for (long a = 0; a < K.values.cols(); ++a) {
        const long a0 = a - a % nt;
        resid = std::max(resid, std::abs(K.values(b, a) - K.values(b0, a0) * std::pow(step, a % nt)));
      }
    }
    CHECK(resid <= 1e-12 * K.values.cwiseAbs().maxCoeff());
  }

  SUBCASE("adjoint symbol") {
    const auto s0 = rank_one_symbol(1, 0.3, 0.0);
    const Eigen::MatrixXcd A = weyl_G_kernel(s0, fam1()).weighted();
    const Eigen::MatrixXcd B = weyl_G_kernel(adjoint_symbol(s0, fam1()), fam1()).weighted();
    CHECK((A.adjoint() - B).norm() <= 1e-6 * A.norm());
    CHECK(code_of([&] { adjoint_symbol(sigma, fam1()); }) == ErrorCode::BadRange);
  }
}

TEST_CASE("Schatten estimates") {
  const auto zero = OperatorSymbolG::zeros(rank_one_symbol(1, 0.7, 1.0).grid, {FreqIndex({1})});
  const auto z = schatten_suite(zero, fam1());
  CHECK(z.s2.pass);
  CHECK(z.s1.lhs == 0.0);

  for (std::uint64_t seed : {1000u, 1001u, 1002u}) {
    CAPTURE(seed);
    const auto sigma = random_single_k_symbol(seed, fam1(), 16);
    const auto K = weyl_G_kernel(sigma, fam1());
    const auto sv = singular_values(K);
    const auto r = schatten_suite(sigma, fam1());
    CHECK(r.s2.pass);
    CHECK(r.s2.rel_err <= 1e-3);
    // Singular values against the weighted Frobenius norm of the kernel.
    const double fro = K.weight() * K.weight() * K.values.squaredNorm();
    CHECK(std::abs(r.s2.lhs - fro) <= 1e-10 * fro);
    CHECK(std::abs(sv.squaredNorm() - fro) <= 1e-10 * fro);
    CHECK(r.s1.lhs >= std::sqrt(r.s2.lhs));
  }
}

TEST_CASE("trace-class bound fails for a concentrated symbol") {
  // sigma supported on one grid point: ||sigma||_1 scales like the cell
  // weight while ||W||_{S_1} >= ||W||_{S_2} scales like its square root.
  auto sigma = rank_one_symbol(1, 0.7, 0.0);
  const std::size_t keep = Field(sigma.grid).flat(std::vector<int>{8, 8, 0});
  for (std::size_t i = 0; i < sigma.grid.size(); ++i)
    if (i != keep) sigma.entries[0][i].values.setZero();
  const auto r = schatten_suite(sigma, fam1());
  CHECK(r.s1.lhs >= std::sqrt(r.s2.lhs) * (1 - 1e-12));
  CHECK_FALSE(r.s1.pass);
  CHECK(r.s1.lhs > 10 * r.s1.rhs);
}

TEST_CASE("f_alpha samples and norm") {
  const auto g = group_grid_for(GridSpec::real(1, 3.0, 24), 1, 8, 1.0);
  const auto f0 = f_alpha_sample(0.0, g, fam1());
  std::vector<double> c(3);
  const double hq = g.axes[0].spacing(), hp = g.axes[1].spacing();
  for (std::size_t i = 0; i < f0.size(); ++i) {
    f0.coords(i, c);
    if (std::abs(c[0]) < 1 - hq && std::abs(c[1]) < 1 - hp) CHECK(std::abs(f0[i] - 1.0) < 1e-12);
    if (std::abs(c[0]) > 1 + hq || std::abs(c[1]) > 1 + hp) CHECK(std::abs(f0[i]) < 1e-12);
  }
  CHECK(code_of([&] { f_alpha_sample(-0.5, g, fam1()); }) == ErrorCode::BadAlpha);

  for (double a : {-0.4, -0.25, 0.0, 0.7}) {
    const double closed = std::pow(std::pow(kTwoPi, 2 * a) / (2 * a + 1), 1) * std::pow(2 / (2 * a + 1), 2);
    CHECK(f_alpha_norm_sq(a, 1, 1) == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("Gaussian matrix elements") {
  // alpha = 0: t^0 integrates e^{ikt} to zero, q integral is an erf.
  for (int k : {1, 2, 5}) {
    const auto me = gaussian_me_1d(FreqIndex({k}), 0.0);
    CHECK(std::abs(me.t_factor[0]) < 1e-12);
    const double erf_ref = 2 * std::sqrt(kPi / k) * std::erf(std::sqrt(double(k)) / 2);
    CHECK(std::abs(me.q_factor - erf_ref) < 1e-8);
  }

  const auto far = gaussian_me_1d(FreqIndex({64}), -0.25);
  CHECK(std::abs(far.q_factor / far.q_gamma_limit - 1) < 1e-2);

  // t factor against the power series of e^{ikt}.
  for (int k : {1, 2}) {
    for (double a : {-0.25, 0.5}) {
      cplx s{}, c(1.0);
      for (int n = 0; n < 90; ++n) {
        s += c * std::pow(kTwoPi, n + a + 1) / (n + a + 1);
        c *= cplx(0.0, k) / double(n + 1);
      }
      s /= kTwoPi;
      CHECK(std::abs(gaussian_me_1d(FreqIndex({k}), a).t_factor[0] - s) < 1e-9);
    }
  }

  // <pi_k(q, p, 0) Phi, Phi> = e^{-|k| (q^2 + p^2) / 4} with no extra
  // constant, for the normalized Gaussian Phi at scale |k|.
  const auto xg = GridSpec::real(1, 10.0, 128);
  for (int k : {1, 3}) {
    const auto phi = Field::sample(xg, [k](std::span<const double> x) {
      return cplx(std::pow(k / kPi, 0.25) * std::exp(-k * x[0] * x[0] / 2));
    });
    for (double q : {0.0, 0.4, -0.9}) {
      for (int j : {64, 66, 70}) {
        const double p = xg.axes[0].node(j);
        const cplx me = matrix_element(FreqIndex({k}), GroupElement({q}, {p}, {0.0}), phi, phi, fam1());
        CHECK(std::abs(me - std::exp(-k * (q * q + p * p) / 4)) < 1e-9);
      }
    }
    // q factor squared against a midpoint sum of that element.
    const double a = 0.5;
    const int M = 20000;
    double s = 0.0;
    for (int i = 0; i < M; ++i) {
      const double q = -1 + (i + 0.5) * 2.0 / M;
      s += std::pow(std::abs(q), a) * std::exp(-k * q * q / 4) * 2.0 / M;
    }
    const auto me = gaussian_me_1d(FreqIndex({k}), a);
    CHECK(std::abs(me.value(1) - me.t_factor[0] * s * s) < 1e-6 * std::abs(me.value(1)));
    CHECK(std::abs(me.value_with_extra_constant(1) - me.value(1) / std::sqrt(kTwoPi)) < 1e-15);
  }
}

TEST_CASE("divergence partial sums") {
  const double rp = 4.0 / 3.0;
  const auto at = divergence_partial_sums(1 / rp - 1, rp, 128, fam1());
  CHECK(at.exponent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at.strictly_increasing);
  REQUIRE(at.ladder.size() == 8);
  for (std::size_t i = 1; i < at.ladder.size(); ++i) CHECK(at.ladder[i].increment >= 0.5 * at.ladder[1].increment);
  CHECK(at.fit_slope > 0.0);

  // Oracle: S(K) by direct summation from the matrix elements.
  double S = 0.0;
  for (int k = 1; k <= 16; ++k) {
    const auto me = gaussian_me_1d(FreqIndex({k}), at.alpha);
    S += std::pow(std::abs(me.value(1)), rp) * k / kTwoPi;
    CHECK(at.S[static_cast<std::size_t>(k - 1)] == doctest::Approx(S).epsilon(1e-12));
  }

  // Below the threshold the increments grow; above it they shrink.
  const auto low = divergence_partial_sums(1 / rp - 1 - 0.2, rp, 128, fam1());
  CHECK(low.ladder.back().increment > low.ladder[1].increment);
  const auto high = divergence_partial_sums(1 / rp - 1 + 0.2, rp, 128, fam1());
  CHECK(high.ladder.back().increment < high.ladder[high.ladder.size() - 2].increment);

  const auto csv = divergence_csv(at);
  CHECK(csv.rfind("K,S,increment,log_slope\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);

  CHECK(code_of([&] { divergence_partial_sums(-0.5, rp, 8, fam1()); }) == ErrorCode::BadRange);
  CHECK(code_of([&] { divergence_partial_sums(-0.25, 2.5, 8, fam1()); }) == ErrorCode::BadRange);
  CHECK(code_of([&] { divergence_partial_sums(-0.25, rp, 0, fam1()); }) == ErrorCode::BadRange);
}

TEST_CASE("linear fit") {
  const auto [b, r2] = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(b == doctest::Approx(2.0));
  CHECK(r2 == doctest::Approx(1.0));

  // Harmonic partial sums grow like log K.
  std::vector<double> lx, ly;
  double h = 0.0;
  for (int K = 1, k = 1; K <= 1024; K *= 2) {
    for (; k <= K; ++k) h += 1.0 / k;
    lx.push_back(std::log(double(K)));
    ly.push_back(h);
  }
  const auto [hb, hr2] = linear_fit(lx, ly);
  CHECK(hb == doctest::Approx(1.0).epsilon(0.05));
  CHECK(hr2 > 0.99);
}
