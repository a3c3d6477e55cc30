#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rhg/rep_fourier.hpp"
#include "rhg/specials.hpp"

using namespace rhg;

namespace {

const OrthFamily& fam1() {
  static const OrthFamily f = build_family(1, 1);
  return f;
}

Field gaussian_state(const GridSpec& xg, double c = 0.0) {
  return Field::sample(xg, [c](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += (v - c) * (v - c);
    return cplx(std::exp(-0.5 * s));
  });
}

// f = e^{-(q^2+p^2)/2}(e^{it} + e^{-2it}/2) on an n = m = 1 group grid.
Field plancherel_function(const GridSpec& g) {
  return Field::sample(g, [](std::span<const double> z) {
    return std::exp(-0.5 * (z[0] * z[0] + z[1] * z[1])) *
           (std::exp(cplx(0.0, z[2])) + 0.5 * std::exp(cplx(0.0, -2.0 * z[2])));
  });
}

}  // namespace

TEST_CASE("representation is unitary and multiplicative") {
  const auto xg = GridSpec::real(1, 10.0, 128);
  const auto h = xg.axes[0].spacing();
  const auto phi = gaussian_state(xg, 0.3);
  const FreqIndex k({2});
  CHECK(max_abs_diff(apply_rep(k, GroupElement::identity(1, 1), phi, fam1()), phi) < 1e-15);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> step(-8, 8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0, hom = 0.0;
  for (int r = 0; r < 100; ++r) {
    const GroupElement a({u(rng)}, {step(rng) * h}, {u(rng) + 2.0});
    const GroupElement b({u(rng)}, {step(rng) * h}, {u(rng) + 2.0});
    const auto pa = apply_rep(k, a, phi, fam1());
    worst = std::max(worst, std::abs(norm(pa) - norm(phi)));
    const auto lhs = apply_rep(k, a, apply_rep(k, b, phi, fam1()), fam1());
    const auto rhs = apply_rep(k, multiply(a, b, fam1()), phi, fam1());
    hom = std::max(hom, max_abs_diff(lhs, rhs));
  }
  CHECK(worst < 1e-9);
  CHECK(hom < 1e-8);
  // Off-lattice shifts go through the spectral path and stay unitary.
  const GroupElement off({0.4}, {0.37}, {0.0});
  CHECK(std::abs(norm(apply_rep(k, off, phi, fam1())) - norm(phi)) < 1e-9);
  const GroupElement far({0.0}, {9.0}, {0.0});
  CHECK_THROWS_AS(apply_rep(k, far, phi, fam1()), Error);
}

TEST_CASE("gaussian matrix element") {
  const auto xg = GridSpec::real(1, 10.0, 128);
  const auto h = xg.axes[0].spacing();
  for (int kk : {1, -2, 3}) {
    const FreqIndex k({kk});
    const double kn = k.norm();
    const auto s = phi_gamma_k({0}, kn, xg);
    CHECK(std::abs(matrix_element(k, GroupElement::identity(1, 1), s, s, fam1()) - 1.0) < 1e-12);
    double worst = 0.0;
    for (int j = -6; j <= 6; ++j) {
      const double q = 0.37 * j, p = j * h * 2, t = 0.5 * j + 1.0;
      const GroupElement a({q}, {p}, {t});
      const cplx lhs = inner(apply_rep(k, a, s, fam1()), s);
      const double tw = wrap_angle(t);
      const cplx rhs = std::exp(cplx(0.0, kk * tw)) * std::exp(-kn * (q * q + p * p) / 4.0);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    CHECK(worst < 1e-6);
  }
  // Conjugate symmetry under a -> a^{-1}.
  const FreqIndex k({1});
  const auto phi = gaussian_state(xg, 0.5);
  const auto psi = gaussian_state(xg, -0.2);
  const GroupElement a({0.3}, {8 * h}, {1.1});
  const cplx m1 = matrix_element(k, a, phi, psi, fam1());
  const cplx m2 = matrix_element(k, inverse(a), psi, phi, fam1());
  CHECK(std::abs(m1 - std::conj(m2)) < 1e-12);
}

TEST_CASE("square integrability constant") {
  const auto xg = GridSpec::real(1, 8.0, 64);
  const auto phi = phi_gamma({0}, xg);
  for (int kk : {1, 2, 3}) {
    const auto r = admissibility_constant(FreqIndex({kk}), phi, fam1());
    const double expect = 4.0 * M_PI * M_PI / kk;
    CHECK(std::abs(r.constant - expect) / expect < 1e-5);
    CHECK(std::abs(r.expected - expect) / expect < 1e-12);
  }
  const auto two = 2.0 * phi;
  const auto r1 = admissibility_constant(FreqIndex({1}), phi, fam1());
  const auto r2 = admissibility_constant(FreqIndex({1}), two, fam1());
  CHECK(r2.integral / r1.integral == doctest::Approx(16.0).epsilon(1e-12));
  const auto narrow = GridSpec::real(1, 3.0, 32);
  CHECK_THROWS_AS(admissibility_constant(FreqIndex({1}), phi_gamma({0}, narrow), fam1()), Error);
}

TEST_CASE("hr-2-2 square integrability") {
  const auto f = family_preset("hr-2-2");
  const auto xg = GridSpec::real(2, 7.0, 32);
  const auto phi = phi_gamma({0, 0}, xg);
  const auto r = admissibility_constant(FreqIndex({1, 0}), phi, f);
  CHECK(std::abs(r.constant - r.expected) / r.expected < 1e-5);
  const auto r2 = admissibility_constant(FreqIndex({0, 2}), phi, f);
  CHECK(std::abs(r2.constant - r2.expected) / r2.expected < 1e-5);
}

TEST_CASE("group Fourier transform and Plancherel") {
  const auto xg = GridSpec::real(1, 8.0, 64);
  const auto g = group_grid_for(xg, 1, 8, 2.0);
  const auto f = plancherel_function(g);
  const auto ks = t_spectrum(f);
  REQUIRE(ks.size() == 2);

  Field zero(g);
  CHECK(gft(zero, FreqIndex({1}), fam1()).values.cwiseAbs().maxCoeff() == 0.0);

  for (const auto& k : ks) {
    const auto op = gft(f, k, fam1());
    const Field fk = torus_coeff(f, k.k);
    const double nfk = norm(fk);
    const double lhs = op.hs_norm() * op.hs_norm();
    const double rhs = 2.0 * M_PI / k.norm() * nfk * nfk;
    CHECK(std::abs(lhs - rhs) / rhs < 1e-6);

    // <Ff(k) phi, psi> against direct quadrature of int f^k <pi_k phi, psi>.
    const auto phi = gaussian_state(xg, 0.4);
    const auto psi = gaussian_state(xg, -0.3);
    const cplx lhs_me = inner(op.apply(phi), psi);
    cplx rhs_me{};
    const double h = xg.axes[0].spacing();
    const double hq = g.axes[0].spacing();
    std::vector<double> z(2);
    for (std::size_t i = 0; i < fk.size(); ++i) {
      fk.coords(i, z);
      cplx s{};
      for (int j = 0; j < 64; ++j) {
        const double x = xg.axes[0].node(j);
        const double y = x + z[1];
        const double ph = z[0] * k.k[0] * (x + 0.5 * z[1]);
        s += std::exp(cplx(0.0, ph)) * std::exp(-0.5 * (y - 0.4) * (y - 0.4)) *
             std::exp(-0.5 * (x + 0.3) * (x + 0.3));
      }
      rhs_me += fk[i] * s * h * h * hq;
    }
    CHECK(std::abs(lhs_me - rhs_me) < 1e-8 * std::abs(rhs_me));
  }

  const auto rep = plancherel_gap(f, fam1());
  CHECK(rep.rel_err < 1e-6);
  CHECK(rep.rel_err_augmented < 1e-6);
  const auto flat = Field::sample(g, [](std::span<const double> z) {
    return cplx(std::exp(-0.5 * (z[0] * z[0] + z[1] * z[1])));
  });
  const auto rep0 = plancherel_gap(flat, fam1());
  CHECK(rep0.lhs == 0.0);
  CHECK(rep0.rhs < 1e-20);
}

TEST_CASE("inversion and trace identity") {
  const auto xg = GridSpec::real(1, 8.0, 64);
  const auto g = group_grid_for(xg, 1, 8, 2.0);
  const auto f = plancherel_function(g);
  const auto ks = t_spectrum(f);
  const auto table = fourier_table(f, fam1(), ks);
  const std::vector<int> zero{0};
  const Field f0 = torus_coeff(f, zero);
  const Field back = invert(table, f0, fam1(), 8);
  CHECK(back.grid() == g);
  CHECK(rel_l2(back, f, Measure::Mu) < 1e-6);

  // Empty table returns f^0 spread over the torus.
  const Field only0 = invert({}, f0, fam1(), 8);
  CHECK(std::abs(norm(only0, Measure::Mu) - norm(f0)) < 1e-12);

  const auto qp = strip_torus(g);
  for (const auto& slot : table) {
    const Field T = trace_table(slot.op, slot.k, qp, fam1());
    const Field fk = torus_coeff(f, slot.k.k);
    const double c = 2.0 * M_PI / slot.k.norm();
    CHECK(max_abs_diff(T, c * fk) < 1e-6 * max_abs(fk) * c);
    const GroupElement a({qp.axes[0].node(35)}, {qp.axes[1].node(29)}, {0.9});
    const cplx tr = trace_rep(slot.op, slot.k, a, fam1());
    const cplx expect = c * std::exp(cplx(0.0, -slot.k.k[0] * 0.9)) * fk[35 * 64 + 29];
    CHECK(std::abs(tr - expect) < 1e-6 * c);
  }

  const auto dir = std::filesystem::temp_directory_path() / "rhg_table_test";
  save_table(table, dir);
  const auto loaded = load_table(dir);
  REQUIRE(loaded.size() == table.size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    CHECK(loaded[s].k.k == table[s].k.k);
    CHECK((loaded[s].op.values - table[s].op.values).cwiseAbs().maxCoeff() == 0.0);
  }
  std::filesystem::remove_all(dir);
}
