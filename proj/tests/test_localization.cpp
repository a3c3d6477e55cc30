#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rhg/localization.hpp"
#include "rhg/specials.hpp"

using namespace rhg;

namespace {

const OrthFamily& fam1() {
  static const OrthFamily f = build_family(1, 1);
  return f;
}

GridSpec xgrid() { return GridSpec::real(1, 8.0, 64); }
GridSpec zgrid() { return GridSpec::real(2, 10.0, 80); }

Field state(const GridSpec& xg) {
  return Field::sample(xg, [](std::span<const double> x) {
    return std::exp(-0.5 * (x[0] - 0.3) * (x[0] - 0.3)) * std::exp(cplx(0.0, 0.5 * x[0]));
  });
}

Field symbol(const GridSpec& g, double a, double b, double width, double mod) {
  return Field::sample(g, [=](std::span<const double> z) {
    const double r = (z[0] - a) * (z[0] - a) + (z[1] - b) * (z[1] - b);
    return std::exp(-r / width) * std::exp(cplx(0.0, mod * z[0]));
  });
}

}  // namespace

TEST_CASE("Gaussian wavelet and its constant") {
  const auto wv = WaveletConfig::gaussian(xgrid());
  CHECK(wv.norm_sq == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  for (int kk : {1, 2, 3}) {
    const FreqIndex k({kk});
    const double closed = wv.c_phi_closed(k, fam1());
    CHECK(std::abs(wv.c_phi(k, fam1()) - closed) / closed < 1e-5);
    CHECK(closed == doctest::Approx(std::pow(2.0 * M_PI, 2.5) / kk).epsilon(1e-12));
  }
}

TEST_CASE("localization operator") {
  const auto xg = xgrid();
  const auto zg = zgrid();
  const auto wv = WaveletConfig::gaussian(xg);
  const auto f = state(xg);

  CHECK(max_abs(localize(Field(zg), FreqIndex({1}), f, fam1(), wv)) == 0.0);

  // F = 1 resolves the identity.
  const auto one = Field::sample(zg, [](std::span<const double>) { return cplx(1.0); });
  for (int kk : {1, 2}) {
    CHECK(rel_l2(localize(one, FreqIndex({kk}), f, fam1(), wv), f) < 1e-4);
  }

  // A point mass at z0 maps pi_k(z0) h_1 (orthogonal to pi_k(z0) phi) to zero.
  Field point(zg);
  const std::vector<int> iz{44, 36};
  point[point.flat(iz)] = 1.0;
  std::vector<double> z0(2);
  point.coords(point.flat(iz), z0);
  const GroupElement a({z0[0]}, {z0[1]}, {0.0});
  const auto h1 = apply_rep(FreqIndex({1}), a, phi_gamma({1}, xg), fam1());
  CHECK(norm(localize(point, FreqIndex({1}), h1, fam1(), wv)) < 1e-12 * norm(h1));

  // Linear in F; conjugating F takes the adjoint.
  const auto F = symbol(zg, 0.5, -0.3, 4.0, 0.4);
  const FreqIndex k({1});
  const auto K = localization_kernel(F, k, fam1(), wv);
  Field Fc(zg);
  for (std::size_t i = 0; i < F.size(); ++i) Fc[i] = std::conj(F[i]);
  const auto Kc = localization_kernel(Fc, k, fam1(), wv);
  const double r = (Kc.weighted() - K.weighted().adjoint()).norm() / K.weighted().norm();
  CHECK(r < 1e-6);
  CHECK(max_abs_diff(K.apply(f), localize(F, k, f, fam1(), wv)) < 1e-12);
  const cplx s(0.4, 1.1);
  CHECK(max_abs_diff(localize(s * F, k, f, fam1(), wv), s * localize(F, k, f, fam1(), wv)) < 1e-12);

  const auto wide = symbol(GridSpec::real(2, 3.0, 24), 0.0, 0.0, 4.0, 0.0);
  CHECK_THROWS_AS(localize(wide, k, f, fam1(), wv), Error);
}

TEST_CASE("transform of f_{k,x}") {
  const auto xg = xgrid();
  const auto f = state(xg);
  const auto wv = WaveletConfig::gaussian(xg);
  for (int kk : {1, 2}) {
    const FreqIndex k({kk});
    // q extent 10 / k keeps k q inside the band of the x grid.
    const GridSpec zg({AxisSpec::real_line(10.0 / kk, 80), AxisSpec::real_line(10.0, 80)});
    for (double x0 : {0.0, 0.75, -1.25}) {
      // f_{k,x}(q, p) by quadrature, then FFT.
      const auto fx = Field::sample(zg, [&](std::span<const double> z) {
        const double q = z[0], p = z[1];
        cplx c{};
        for (int j = 0; j < 64; ++j) {
          const double y = xg.axes[0].node(j);
          const double ph = kk * q * (y + 0.5 * p);
          c += f[static_cast<std::size_t>(j)] * std::exp(cplx(0.0, -ph)) * std::pow(2.0, 0.25) *
               std::exp(-0.5 * (y + p) * (y + p));
        }
        c *= xg.axes[0].spacing();
        const double ph = kk * q * (x0 + 0.5 * p);
        return c * std::exp(cplx(0.0, ph)) * std::pow(2.0, 0.25) * std::exp(-0.5 * (x0 + p) * (x0 + p));
      });
      const auto direct = fourier_forward(fx);
      const double xs[1] = {x0};
      const auto closed = lemma_kernel_ft(f, k, xs, direct.grid(), fam1());
      CHECK(max_abs_diff(closed, direct) < 1e-6 * max_abs(direct));
      // At the origin the transform is the overlap integral.
      const std::vector<int> origin{40, 40};
      const cplx at0 = std::sqrt(2.0 * M_PI) / kk * f[static_cast<std::size_t>(std::lround((x0 + 8.0) / 0.25))];
      if (std::abs(x0 - 0.75) < 1e-12 || x0 == 0.0) {
        CHECK(std::abs(closed[closed.flat(origin)] - at0) < 1e-10);
      }
    }
  }
  CHECK(max_abs(lemma_kernel_ft(Field(xg), FreqIndex({1}), std::vector<double>{0.0}, zgrid(), fam1())) == 0.0);
  (void)wv;
}

TEST_CASE("reindexed symbol and Lambda") {
  const auto zg = GridSpec::real(2, 10.0, 80);
  const auto F = symbol(zg, 0.5, -0.3, 1.0, 0.0);
  // k = 1: F^1(q, p) = F(p, -q).
  const auto F1 = reindex_symbol(F, FreqIndex({1}), fam1());
  std::vector<double> z(2);
  double worst = 0.0;
  for (std::size_t i = 0; i < F1.size(); ++i) {
    F1.coords(i, z);
    const double r = (z[1] - 0.5) * (z[1] - 0.5) + (-z[0] + 0.3) * (-z[0] + 0.3);
    worst = std::max(worst, std::abs(F1[i] - std::exp(-r)));
  }
  CHECK(worst < 1e-9);
  // k = 2 shrinks by 2 and the transform obeys hat F^k(q, p) = ||k||^2 hat F(B p, -B^t q).
  for (int kk : {1, 2}) {
    const FreqIndex k({kk});
    const auto Fk = reindex_symbol(F, k, fam1());
    const auto lhs = fourier_forward(Fk);
    const auto rhs = reindexed_hat(F, k, lhs.grid(), fam1());
    CHECK(max_abs_diff(lhs, rhs) < 1e-7 * max_abs(lhs));
    // Round trip through the inverse relabelling.
    const auto back = unreindex_symbol(Fk, k, fam1(), zg);
    CHECK(max_abs_diff(back, F) < 1e-8);
  }
  const auto F2 = reindex_symbol(F, FreqIndex({2}), fam1());
  const std::vector<int> at{40 + 4, 40};  // (q, p) = (1, 0) -> F(0, -0.5)
  CHECK(std::abs(F2[F2.flat(at)] - std::exp(-((0.5 * 0.5) + (-0.5 + 0.3) * (-0.5 + 0.3)))) < 1e-9);

  const auto wide = GridSpec::real(2, 16.0, 128);

  for (int kk : {1, 2, 3}) {
    const auto L = lambda_symbol(FreqIndex({kk}), wide, fam1());
    const auto fft = fourier_forward(L.lambda);
    CHECK(max_abs_diff(fft, L.lambda_hat) < 1e-8);
    const std::vector<int> origin{64, 64};
    CHECK(L.lambda_hat[L.lambda_hat.flat(origin)] == cplx(1.0));
    if (kk == 1) {
      const std::vector<int> id{68, 62};
      std::vector<double> c(2);
      L.lambda.coords(L.lambda.flat(id), c);
      CHECK(std::abs(L.lambda[L.lambda.flat(id)] - 2.0 * std::exp(-c[0] * c[0] - c[1] * c[1])) < 1e-15);
    }
  }
}

TEST_CASE("localization as a k-Weyl transform") {
  const auto xg = xgrid();
  const auto zg = zgrid();
  const auto wv = WaveletConfig::gaussian(xg);
  const auto f = state(xg);
  const auto F = symbol(zg, 0.5, -0.3, 4.0, 0.0);
  for (int kk : {1, 2}) {
    const auto r = loc_as_weyl_gap(F, FreqIndex({kk}), f, fam1(), wv);
    CHECK(r.lhs_norm > 1e-2);
    CHECK(r.gap < 1e-4);
  }
  const auto z = loc_as_weyl_gap(Field(zg), FreqIndex({1}), f, fam1(), wv);
  CHECK(z.lhs_norm == 0.0);
  CHECK(z.rhs_norm == 0.0);

  // The symbol computed from the literal convolution F^k * Lambda^k,
  // normalized by (2 pi)^{-n}, matches the closed product of transforms.
  const FreqIndex k({1});
  const auto sg = symbol_grid(phase_grid(xg));
  // F^1(q, p) = F(p, -q) written out.
  const auto Fk = Field::sample(zg, [](std::span<const double> z) {
    const double r = (z[1] - 0.5) * (z[1] - 0.5) + (-z[0] + 0.3) * (-z[0] + 0.3);
    return cplx(std::exp(-r / 4.0));
  });
  const auto sigma = Field::sample(sg, [&](std::span<const double> w) {
    // Direct convolution on the F grid evaluated at (x, xi).
    std::vector<double> z(2);
    cplx s{};
    for (std::size_t j = 0; j < Fk.size(); ++j) {
      Fk.coords(j, z);
      const double u = w[0] - z[0], v = w[1] - z[1];
      s += Fk[j] * 2.0 * std::exp(-u * u - v * v);
    }
    return s * zg.cell_weight() / (2.0 * M_PI);
  });
  const auto via_symbol = weyl_k_apply(sigma, k, f, fam1());
  CHECK(rel_l2(via_symbol, localize(F, k, f, fam1(), wv)) < 1e-4);
}

TEST_CASE("Gaussian-weighted convolution") {
  const auto g = GridSpec::real(2, 4.0, 16);
  const auto F = symbol(g, 0.3, -0.2, 1.2, 0.4);
  const auto G = symbol(g, -0.5, 0.25, 1.0, -0.3);
  const FreqIndex k({2});
  Field delta(g);
  const std::vector<int> origin{8, 8};
  delta[delta.flat(origin)] = 1.0 / g.cell_weight();
  CHECK(max_abs_diff(new_conv(F, delta, k, fam1()), F) < 1e-14);

  const auto H = new_conv(F, G, k, fam1());
  const double h = g.axes[0].spacing(), L = 4.0, k2 = 4.0;
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const double xi = -L + i * h, eta = -L + j * h;
      cplx s{};
      for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < 16; ++b) {
          const double q = -L + a * h, p = -L + b * h;
          const int da = i - a + 8, db = j - b + 8;
          if (da < 0 || da >= 16 || db < 0 || db >= 16) continue;
          const std::vector<int> fd{da, db}, gz{a, b};
          const double wexp = -p * p / 2 - k2 * q * q / 2 + eta * p / 2 + k2 * xi * q / 2;
          const double br = 2.0 * (q * eta - xi * p);
          s += F[F.flat(fd)] * G[G.flat(gz)] * std::exp(wexp) * std::exp(cplx(0.0, 0.5 * br));
        }
      }
      const std::vector<int> id{i, j};
      worst = std::max(worst, std::abs(H[H.flat(id)] - s * h * h));
    }
  }
  CHECK(worst < 1e-8 * max_abs(H));
  CHECK_THROWS_AS(new_conv(F, Field(GridSpec::real(2, 4.0, 8)), k, fam1()), Error);
}

TEST_CASE("product of localization operators") {
  const auto xg = xgrid();
  const auto zg = zgrid();
  const auto wv = WaveletConfig::gaussian(xg);
  const auto f = state(xg);
  const auto F = symbol(zg, 0.5, -0.3, 4.0, 0.0);
  const auto G = symbol(zg, -0.4, 0.2, 3.0, 0.3);
  const FreqIndex k({1});
  const auto r = product_symbol_gap(F, G, k, f, fam1(), wv);
  CHECK(r.lhs_norm > 1e-2);
  CHECK(r.gap < 1e-3);

  const auto z = product_symbol_gap(F, Field(zg), k, f, fam1(), wv);
  CHECK(z.lhs_norm == 0.0);
  CHECK(z.rhs_norm < 1e-14);

  // The two orderings differ.
  const auto fg = localize(F, k, localize(G, k, f, fam1(), wv), fam1(), wv);
  const auto gf = localize(G, k, localize(F, k, f, fam1(), wv), fam1(), wv);
  CHECK(norm(fg - gf) / norm(f) > 1e-2);

  // Narrower symbols at k = 2.
  const auto F2 = symbol(zg, 1.0, -0.3, 2.0, 0.0);
  const auto G2 = symbol(zg, -0.4, 1.2, 2.0, 0.3);
  CHECK(product_symbol_gap(F2, G2, FreqIndex({2}), f, fam1(), wv).gap < 1e-3);
}

TEST_CASE("counterexample and the W_c ladder") {
  // hat F^k = e^{(||k||^2 |q|^2 + |p|^2)/4} on A, hat G^k = e^{-||k||^2 |q|^2/2} on |p| <= 10.
  const auto g = GridSpec::real(2, 16.0, 128);
  const FreqIndex k({1});
  const auto Fh = Field::sample(g, [](std::span<const double> z) {
    if (std::abs(z[0]) > 12.0 || std::abs(z[1]) > 12.0) return cplx(0.0);
    return cplx(std::exp((z[0] * z[0] + z[1] * z[1]) / 4.0));
  });
  const auto Gh = Field::sample(g, [](std::span<const double> z) {
    if (std::abs(z[1]) > 10.0) return cplx(0.0);
    return cplx(std::exp(-z[0] * z[0] / 2.0));
  });
  const auto H = new_conv(Fh, Gh, k, fam1());
  // Along xi = 0 the output is C e^{eta^2/6}, C = 4 pi / sqrt 3.
  const double C = std::sqrt(16.0 * M_PI * M_PI / 3.0);
  double worst = 0.0, worst_c = 0.0;
  const std::vector<int> origin{64, 64};
  const cplx h0 = H[H.flat(origin)];
  for (int j = 48; j <= 80; ++j) {
    const std::vector<int> id{64, j};
    const double eta = g.axes[1].node(j);
    worst = std::max(worst, std::abs(H[H.flat(id)] / h0 - std::exp(eta * eta / 6.0)));
    worst_c = std::max(worst_c, std::abs(H[H.flat(id)] - C * std::exp(eta * eta / 6.0)) / (C * std::exp(eta * eta / 6.0)));
  }
  CHECK(worst < 1e-4);
  CHECK(worst_c < 1e-4);
  const auto ladder = wclass_test(H, 0.0, k, fam1(), {4.0, 8.0, 12.0, 15.75});
  CHECK(ladder.verdict == WcVerdict::Nonmember);

  // Ladder semantics.
  const auto gauss = Field::sample(g, [](std::span<const double> z) {
    return cplx(std::exp(-2.0 * (z[0] * z[0] + z[1] * z[1])));
  });
  const std::vector<double> radii{2.0, 4.0, 6.0, 8.0};
  CHECK(wclass_test(gauss, 1.0, k, fam1(), radii).verdict == WcVerdict::Member);
  CHECK(wclass_test(gauss, 0.0, k, fam1(), radii).verdict == WcVerdict::Member);
  const auto rep = wclass_test(Fh, 0.5, k, fam1(), {3.0, 6.0, 9.0, 12.0});
  CHECK(rep.verdict == WcVerdict::Nonmember);
  for (std::size_t i = 1; i < rep.witness.size(); ++i) CHECK(rep.witness[i] >= rep.witness[i - 1]);
}

TEST_CASE("c_epsilon window") {
  CHECK(c_epsilon(1.0, 0.5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(c_epsilon(1.0, 4.0 / 9.0), Error);
  CHECK_THROWS_AS(c_epsilon(1.0, 0.75), Error);
  CHECK(c_epsilon(1.0, 0.45) > 0.0);
  CHECK(c_epsilon(1.0, 0.7499) > 0.0);
  CHECK_THROWS_AS(c_epsilon(0.3, 0.5), Error);
}
