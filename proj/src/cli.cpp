#include "rhg/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "rhg/error.hpp"
#include "rhg/localization.hpp"
#include "rhg/specials.hpp"
#include "rhg/weyl_G.hpp"
#include "rhg/weyl_k.hpp"

namespace rhg {

using ojson = nlohmann::ordered_json;

void SuiteConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (n < 1 || m < 1) bad("n and m must be positive");
  for (int v : {grid, torus, g_grid, g_torus, kernel_grid})
    if (v < 2 || v % 2 != 0) bad("grid sizes must be even and at least 2");
  for (double v : {extent, g_extent, kernel_extent})
    if (!(v > 0.0)) bad("extents must be positive");
  if (kmax < 1) bad("kmax must be at least 1");
  if (symbols < 1) bad("symbols must be at least 1");
  if (demo_kmax < 64) bad("demo_kmax must be at least 64");
  for (const auto& [name, t] : tol)
    if (!(t > 0.0)) bad("tolerance for " + name + " must be positive");
}

double SuiteConfig::tolerance(const std::string& suite, double fallback) const {
  const auto it = tol.find(suite);
  return it == tol.end() ? fallback : it->second;
}

SuiteConfig config_from_json(const std::string& text) {
  SuiteConfig c;
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "n") c.n = v.get<int>();
      else if (key == "m") c.m = v.get<int>();
      else if (key == "family") c.family = v.get<std::string>();
      else if (key == "grid") c.grid = v.get<int>();
      else if (key == "extent") c.extent = v.get<double>();
      else if (key == "torus") c.torus = v.get<int>();
      else if (key == "kmax") c.kmax = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "tol") c.tol = v.get<std::map<std::string, double>>();
      else if (key == "g_grid") c.g_grid = v.get<int>();
      else if (key == "g_extent") c.g_extent = v.get<double>();
      else if (key == "g_torus") c.g_torus = v.get<int>();
      else if (key == "kernel_grid") c.kernel_grid = v.get<int>();
      else if (key == "kernel_extent") c.kernel_extent = v.get<double>();
      else if (key == "symbols") c.symbols = v.get<int>();
      else if (key == "demo_kmax") c.demo_kmax = v.get<int>();
      else if (key == "out") c.out = v.get<std::string>();
      else throw Error(ErrorCode::ConfigInvalid, "unknown key " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  c.validate();
  return c;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

namespace {

ojson config_json(const SuiteConfig& c) {
  ojson j;
  j["n"] = c.n;
  j["m"] = c.m;
  j["family"] = c.family;
  j["grid"] = c.grid;
  j["extent"] = c.extent;
  j["torus"] = c.torus;
  j["kmax"] = c.kmax;
  j["seed"] = c.seed;
  j["tol"] = ojson::object();
  for (const auto& [k, v] : c.tol) j["tol"][k] = v;
  j["g_grid"] = c.g_grid;
  j["g_extent"] = c.g_extent;
  j["g_torus"] = c.g_torus;
  j["kernel_grid"] = c.kernel_grid;
  j["kernel_extent"] = c.kernel_extent;
  j["symbols"] = c.symbols;
  j["demo_kmax"] = c.demo_kmax;
  return j;
}

}  // namespace

std::string config_to_json(const SuiteConfig& config) { return config_json(config).dump(); }

bool Report::pass() const {
  for (const auto& r : records)
    if (!r.pass) return false;
  return true;
}

std::string digest(std::initializer_list<const Field*> fields, const std::string& params) {
  std::uint64_t h = 14695981039346656037ull;
  auto eat = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const Field* f : fields) eat(f->values().data(), f->size() * sizeof(cplx));
  eat(params.data(), params.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest(const std::string& params) { return digest({}, params); }

namespace {

double rel(double lhs, double rhs) {
  const double d = std::abs(lhs - rhs);
  return rhs != 0.0 ? d / std::abs(rhs) : d;
}

CheckRecord check(std::string name, std::string dig, double lhs, double rhs, double rel_err, double tol) {
  CheckRecord r;
  r.name = std::move(name);
  r.digest = std::move(dig);
  r.lhs = lhs;
  r.rhs = rhs;
  r.rel_err = rel_err;
  r.tolerance = tol;
  r.pass = rel_err <= tol;
  return r;
}

OrthFamily family_of(const SuiteConfig& c) {
  OrthFamily f = c.family.empty() ? build_family(c.n, c.m) : family_preset(c.family);
  if (f.n != c.n || f.m != c.m) throw Error(ErrorCode::ConfigInvalid, "family does not match n and m");
  return f;
}

void require_n1m1(const SuiteConfig& c, const std::string& suite) {
  if (c.n != 1 || c.m != 1) throw Error(ErrorCode::ConfigInvalid, suite + " runs with n = m = 1 only");
}

std::string kname(const FreqIndex& k) {
  std::string s = "k=";
  for (std::size_t i = 0; i < k.k.size(); ++i) s += (i ? "," : "") + std::to_string(k.k[i]);
  return s;
}

// f = e^{-(q^2+p^2)/2}(e^{it} + e^{-2it}/2).
Field plancherel_function(const GridSpec& g) {
  return Field::sample(g, [](std::span<const double> z) {
    return std::exp(-0.5 * (z[0] * z[0] + z[1] * z[1])) *
           (std::polar(1.0, z[2]) + 0.5 * std::polar(1.0, -2.0 * z[2]));
  });
}

GridSpec plancherel_grid(const SuiteConfig& c) {
  return group_grid_for(GridSpec::real(1, c.extent, c.grid), 1, c.torus, 2.0);
}

std::vector<FreqIndex> capped(const std::vector<FreqIndex>& ks, int kmax) {
  std::vector<FreqIndex> out;
  for (const auto& k : ks)
    if (std::abs(k.k[0]) <= kmax) out.push_back(k);
  return out;
}

Report plancherel_suite(const SuiteConfig& c) {
  require_n1m1(c, "plancherel");
  Report r{"plancherel", "Plancherel theorem: Ff(k) is Hilbert-Schmidt and the weighted HS norms sum to ||f - f^0||^2", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto f = plancherel_function(plancherel_grid(c));
  const auto ks = capped(t_spectrum(f), c.kmax);
  const auto rep = plancherel_gap(f, fam, ks);
  const double tol = c.tolerance("plancherel", 1e-6);
  const auto d = digest({&f}, "plancherel");
  r.records.push_back(check("plancherel", d, rep.lhs, rep.rhs, rep.rel_err, tol));
  r.records.push_back(check("plancherel_with_zero_mode", d, rep.lhs_augmented, rep.rhs_augmented,
                            rep.rel_err_augmented, tol));
  return r;
}

Report inversion_suite(const SuiteConfig& c) {
  require_n1m1(c, "inversion");
  Report r{"inversion", "inversion theorem: f = sum_k tr(pi_k^* Ff(k)) (2 pi)^{-n} ||k||^n + f^0", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto g = plancherel_grid(c);
  const auto f = plancherel_function(g);
  const auto ks = capped(t_spectrum(f), c.kmax);
  const auto table = fourier_table(f, fam, ks);
  const Field f0 = torus_coeff(f, std::vector<int>{0});
  const Field back = invert(table, f0, fam, c.torus);
  const double tol = c.tolerance("inversion", 1e-6);
  const auto d = digest({&f}, "inversion");
  r.records.push_back(check("round_trip", d, norm(back, Measure::Mu), norm(f, Measure::Mu),
                            rel_l2(back, f, Measure::Mu), tol));
  const auto qp = strip_torus(g);
  for (const auto& slot : table) {
    const Field T = trace_table(slot.op, slot.k, qp, fam);
    const Field fk = torus_coeff(f, slot.k.k);
    const double w = kTwoPi / slot.k.norm();
    const double scale = w * max_abs(fk);
    r.records.push_back(check("trace_identity_" + kname(slot.k), d, max_abs(T), scale,
                              max_abs_diff(T, w * fk) / scale, tol));
  }
  return r;
}

Report square_integrability_suite(const SuiteConfig& c) {
  Report r{"square-integrability", "square integrability: int_G |<phi, pi_k phi>|^2 = |det B_k|^{-1} (2 pi)^{m+n} ||phi||^4", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto xg = GridSpec::real(c.n, c.extent, c.grid);
  const auto phi = phi_gamma(MultiIndex(static_cast<std::size_t>(c.n), 0), xg);
  const double tol = c.tolerance("square-integrability", 1e-5);
  for (int kk = 1; kk <= std::min(3, c.kmax); ++kk) {
    std::vector<int> kv(static_cast<std::size_t>(c.m), 0);
    kv[0] = kk;
    const FreqIndex k(kv);
    const auto a = admissibility_constant(k, phi, fam);
    r.records.push_back(check("admissibility_" + kname(k), digest({&phi}, kname(k)), a.constant, a.expected,
                              rel(a.constant, a.expected), tol));
  }
  return r;
}

Report wigner_k_suite(const SuiteConfig& c) {
  require_n1m1(c, "wigner-k");
  Report r{"wigner-k", "Gaussian k-Wigner closed form: V_k(phi, phi)(-q, -p) = e^{-|p|^2/4 - ||k||^2 |q|^2/4}", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto xg = GridSpec::real(1, c.extent, c.grid);
  const auto qp = phase_grid(xg);
  const auto phi = Field::sample(xg, [](std::span<const double> x) {
    return cplx(std::pow(2.0, 0.25) * std::exp(-0.5 * x[0] * x[0]));
  });
  const double tol = c.tolerance("wigner-k", 1e-8);
  const int N = c.grid;
  for (int s : {1, -1}) {
    for (int kk = 1; kk <= c.kmax; ++kk) {
      const FreqIndex k({s * kk});
      const Field V = fourier_wigner_k(phi, phi, k, fam, qp);
      double worst = 0.0;
      std::vector<double> z(2);
      std::vector<int> id(2);
      for (std::size_t i = 0; i < V.size(); ++i) {
        V.indices(i, id);
        if (id[0] == 0 || id[1] == 0) continue;  // no mirror partner on the grid
        V.coords(i, z);
        const double expect = std::exp(-z[1] * z[1] / 4.0 - kk * kk * z[0] * z[0] / 4.0);
        const std::vector<int> mirror{N - id[0], N - id[1]};
        worst = std::max(worst, std::abs(V[V.flat(mirror)] - expect));
      }
      r.records.push_back(check("closed_form_" + kname(k), digest({&phi}, kname(k)), worst, 0.0, worst, tol));
    }
  }
  return r;
}

Field gauss2(const GridSpec& g, double a, double b, double wq, double wp, double phase) {
  return Field::sample(g, [=](std::span<const double> z) {
    const double q = (z[0] - a) * (z[0] - a) / wq + (z[1] - b) * (z[1] - b) / wp;
    return std::exp(-q / 2.0) * std::polar(1.0, phase * (z[0] - z[1]));
  });
}

Field xbump(const GridSpec& xg, double c0, double s) {
  return Field::sample(xg, [c0, s](std::span<const double> x) {
    return std::exp(-0.5 * (x[0] - c0) * (x[0] - c0)) * std::polar(1.0, s * x[0]);
  });
}

Report weyl_product_suite(const SuiteConfig& c) {
  require_n1m1(c, "weyl-product");
  Report r{"weyl-product", "Weyl product: W_sigma W_tau = W_gamma with gamma-hat = (2 pi)^{-n} sigma-hat *_k tau-hat", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto xg = GridSpec::real(1, c.extent, c.grid);
  const auto qp = phase_grid(xg);
  const auto f = xbump(xg, 0.2, 0.6);
  const auto sh = gauss2(qp, 0.4, -0.3, 2.0, 0.8, 0.5);
  const auto th = gauss2(qp, -0.5, 0.5, 2.5, 0.6, -0.2);
  const double tol = c.tolerance("weyl-product", 1e-4);
  for (int kk = 1; kk <= std::min(2, c.kmax); ++kk) {
    const FreqIndex k({kk});
    const auto g = weyl_product_gap(sh, th, k, f, fam);
    r.records.push_back(check("product_" + kname(k), digest({&f, &sh, &th}, kname(k)), g.lhs_norm, g.rhs_norm,
                              g.gap, tol));
  }
  return r;
}

Field zsymbol(const GridSpec& g, double a, double b, double width, double mod) {
  return Field::sample(g, [=](std::span<const double> z) {
    const double q = (z[0] - a) * (z[0] - a) + (z[1] - b) * (z[1] - b);
    return std::exp(-q / width) * std::polar(1.0, mod * z[0]);
  });
}

Field loc_state(const GridSpec& xg) {
  return Field::sample(xg, [](std::span<const double> x) {
    return std::exp(-0.5 * (x[0] - 0.3) * (x[0] - 0.3)) * std::polar(1.0, 0.5 * x[0]);
  });
}

// Symbols of the localization suites live on their own (q, p) grid.
GridSpec loc_zgrid(const SuiteConfig&) { return GridSpec::real(2, 10.0, 80); }

Report localization_weyl_suite(const SuiteConfig& c) {
  require_n1m1(c, "localization-weyl");
  Report r{"localization-weyl", "localization operators are k-Weyl transforms: L_F = W^k_{F^k * Lambda^k}", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto xg = GridSpec::real(1, c.extent, c.grid);
  const auto zg = loc_zgrid(c);
  const auto wv = WaveletConfig::gaussian(xg);
  const auto f = loc_state(xg);
  const auto F = zsymbol(zg, 0.5, -0.3, 4.0, 0.0);
  const double tol = c.tolerance("localization-weyl", 1e-4);
  for (int kk = 1; kk <= std::min(2, c.kmax); ++kk) {
    const FreqIndex k({kk});
    const auto g = loc_as_weyl_gap(F, k, f, fam, wv);
    r.records.push_back(check("loc_as_weyl_" + kname(k), digest({&f, &F}, kname(k)), g.lhs_norm, g.rhs_norm,
                              g.gap, tol));
  }
  return r;
}

Report localization_product_suite(const SuiteConfig& c) {
  require_n1m1(c, "localization-product");
  Report r{"localization-product", "product formula: L_F L_G = L_H with H-hat^k = (2 pi)^{-n} (F-hat^k (*) G-hat^k)", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto xg = GridSpec::real(1, c.extent, c.grid);
  const auto zg = loc_zgrid(c);
  const auto wv = WaveletConfig::gaussian(xg);
  const auto f = loc_state(xg);
  const double tol = c.tolerance("localization-product", 1e-3);
  struct Case {
    int k;
    Field F, G;
  };
  std::vector<Case> cases;
  cases.push_back({1, zsymbol(zg, 0.5, -0.3, 4.0, 0.0), zsymbol(zg, -0.4, 0.2, 3.0, 0.3)});
  // k = 2 needs narrower symbols to keep the product in band.
  if (c.kmax >= 2) cases.push_back({2, zsymbol(zg, 1.0, -0.3, 2.0, 0.0), zsymbol(zg, -0.4, 1.2, 2.0, 0.3)});
  for (const auto& cs : cases) {
    const FreqIndex k({cs.k});
    const auto g = product_symbol_gap(cs.F, cs.G, k, f, fam, wv);
    r.records.push_back(check("product_" + kname(k), digest({&f, &cs.F, &cs.G}, kname(k)), g.lhs_norm,
                              g.rhs_norm, g.gap, tol));
  }
  return r;
}

Report wclass_suite(const SuiteConfig& c) {
  require_n1m1(c, "wclass");
  Report r{"wclass", "counterexample: F-hat^k (*) G-hat^k grows like e^{|eta|^2/6} and leaves W_c^k", {}, {}, -1.0};
  const auto fam = family_of(c);
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
  const auto H = new_conv(Fh, Gh, k, fam);
  const auto d = digest({&Fh, &Gh}, "wclass");
  const double C = std::sqrt(16.0 * kPi * kPi / 3.0);
  const cplx h0 = H[H.flat(std::vector<int>{64, 64})];
  double ratio = 0.0, absolute = 0.0;
  for (int j = 48; j <= 80; ++j) {
    const double eta = g.axes[1].node(j);
    const double shape = std::exp(eta * eta / 6.0);
    const cplx v = H[H.flat(std::vector<int>{64, j})];
    ratio = std::max(ratio, std::abs(v / h0 - shape) / shape);
    absolute = std::max(absolute, std::abs(v - C * shape) / (C * shape));
  }
  const double tol = c.tolerance("wclass", 1e-4);
  r.records.push_back(check("shape_ratio", d, std::abs(h0), C, ratio, tol));
  r.records.push_back(check("shape_constant", d, std::abs(h0), C, absolute, tol));
  const auto ladder = wclass_test(H, 0.0, k, fam, {4.0, 8.0, 12.0, 15.75});
  CheckRecord lr = check("ladder_nonmember", d, ladder.witness.back(), ladder.witness.front(), 0.0, 0.0);
  lr.pass = ladder.verdict == WcVerdict::Nonmember;
  for (std::size_t i = 0; i < ladder.radii.size(); ++i)
    lr.extra.emplace_back("witness_r" + std::to_string(i), ladder.witness[i]);
  r.records.push_back(lr);
  return r;
}

GridSpec moyal_grid(const SuiteConfig& c) {
  return group_grid_for(GridSpec::real(1, c.g_extent, c.g_grid), 1, c.g_torus, 1.0);
}

Field gbump(const GridSpec& g, double a, double b, double w, cplx c1, cplx cm1, cplx c0) {
  return Field::sample(g, [=](std::span<const double> x) {
    const double q = (x[0] - a) * (x[0] - a) + (x[1] - b) * (x[1] - b);
    return std::exp(-q / (2 * w * w)) * (c1 * std::polar(1.0, x[2]) + cm1 * std::polar(1.0, -x[2]) + c0);
  });
}

const std::vector<FreqIndex>& pm1() {
  static const std::vector<FreqIndex> ks{FreqIndex({1}), FreqIndex({-1})};
  return ks;
}

Report moyal_suite(const SuiteConfig& c) {
  require_n1m1(c, "moyal");
  Report r{"moyal", "Moyal identity on G: <V(f1, g1), V(f2, g2)> = <f1 - f1^0, f2 - f2^0> <g1, g2>", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto g = moyal_grid(c);
  const auto f1 = gbump(g, 0.3, -0.2, 0.75, 1.0, 0.5, 0.2);
  const auto f2 = gbump(g, -0.1, 0.4, 0.7, cplx(0.3, 0.7), 1.0, -0.4);
  const auto g1 = gbump(g, 0.2, 0.1, 0.7, 0.0, 0.0, 1.0);
  const auto g2 = gbump(g, -0.3, 0.2, 0.75, 0.0, 0.0, cplx(1.0, 0.5));
  const double tol = c.tolerance("moyal", 1e-4);
  const auto a = moyal_gap(f1, g1, f2, g2, pm1(), fam);
  CheckRecord ra = check("moyal", digest({&f1, &g1, &f2, &g2}, "moyal"), std::abs(a.lhs), std::abs(a.rhs),
                         a.rel_err, tol);
  ra.extra = {{"lhs_re", a.lhs.real()}, {"lhs_im", a.lhs.imag()}, {"rhs_re", a.rhs.real()}, {"rhs_im", a.rhs.imag()}};
  r.records.push_back(ra);
  const auto even = gbump(g, 0.0, 0.0, 0.7, 0.0, 0.0, 1.0);
  const auto odd = Field::sample(g, [](std::span<const double> x) {
    return cplx(x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2 * 0.7 * 0.7)));
  });
  const auto b = moyal_gap(f1, even, f2, odd, pm1(), fam);
  r.records.push_back(check("moyal_orthogonal_windows", digest({&f1, &even, &f2, &odd}, "moyal"), std::abs(b.lhs),
                            std::abs(b.rhs), b.rel_err, tol));
  return r;
}

Report ft_recovery_suite(const SuiteConfig& c) {
  require_n1m1(c, "ft-recovery");
  Report r{"ft-recovery", "Fourier recovery: C^{-1} int_G V(f, g)(a, k) dmu(a) = Ff(k), and the Wigner inversion", {}, {}, -1.0};
  const auto fam = family_of(c);
  const auto g = moyal_grid(c);
  const auto f = gbump(g, 0.3, -0.2, 0.75, 1.0, 0.5, 0.2);
  const auto w = gbump(g, 0.2, 0.1, 0.7, 0.3, 0.0, 1.0);
  const double tol = c.tolerance("ft-recovery", 1e-4);
  const auto d = digest({&f, &w}, "ft-recovery");
  const auto rec = ft_recovery_gap(f, w, pm1(), fam);
  for (std::size_t s = 0; s < pm1().size(); ++s) {
    const double target = gft(f, pm1()[s], fam).hs_norm();
    r.records.push_back(check("recovery_" + kname(pm1()[s]), d, target * (1.0 + rec.rel_err[s]), target,
                              rec.rel_err[s], tol));
  }
  Field target = f;
  const auto f0 = torus_coeff(f, std::vector<int>{0});
  const auto nt = static_cast<std::size_t>(c.g_torus);
  for (std::size_t i = 0; i < target.size(); ++i) target[i] -= f0[i / nt];
  const auto inv = wigner_inversion(f, w, pm1(), fam);
  r.records.push_back(check("wigner_inversion", d, norm(inv, Measure::Mu), norm(target, Measure::Mu),
                            rel_l2(inv, target, Measure::Mu), tol));
  return r;
}

Report schatten_suite_report(const SuiteConfig& c) {
  require_n1m1(c, "schatten");
  Report r{"schatten", "Schatten classes: ||W_sigma||_{S_2} = ||sigma||_2 and ||W_sigma||_{S_1} <= 2^{-2n-m} ||sigma||_1", {}, {}, -1.0};
  const auto fam = family_of(c);
  const double tol = c.tolerance("schatten", 1e-3);
  for (int i = 0; i < c.symbols; ++i) {
    const std::uint64_t seed = c.seed * 1000 + static_cast<std::uint64_t>(i);
    const auto sigma = random_single_k_symbol(seed, fam, c.kernel_grid, c.kernel_extent, 4);
    const auto rep = schatten_suite(sigma, fam, tol);
    const auto d = digest("symbol seed " + std::to_string(seed) + " " + kname(sigma.ks[0]));
    const std::string tag = std::to_string(i);
    CheckRecord s2 = check("s2_equality_" + tag, d, rep.s2.lhs, rep.s2.rhs, rep.s2.rel_err, tol);
    s2.extra = {{"r", 2.0}, {"slack", rep.s2.slack}};
    r.records.push_back(s2);
    CheckRecord s1 = check("s1_bound_" + tag, d, rep.s1.lhs, rep.s1.rhs, rep.s1.rel_err, 0.0);
    s1.pass = rep.s1.pass;
    s1.extra = {{"r", 1.0}, {"slack", rep.s1.slack}};
    r.records.push_back(s1);
  }
  return r;
}

// Ratio of consecutive ladder increments from K = from on.
bool increments_decay(const DivergenceReport& d, int from) {
  for (std::size_t i = 1; i < d.ladder.size(); ++i)
    if (d.ladder[i].K > from && !(d.ladder[i].increment < d.ladder[i - 1].increment)) return false;
  return true;
}

Report unbounded_suite(const SuiteConfig& c) {
  Report r{"unbounded-demo", "demonstration: W_sigma is unbounded for r > 2; S(K) diverges by the p-test when (m+n)(alpha+1)r' - n <= m", {}, {}, -1.0};
  const auto fam = family_of(c);
  const double rp = 4.0 / 3.0;
  const double alpha = 1.0 / rp - 1.0;
  const auto at = divergence_partial_sums(alpha, rp, c.demo_kmax, fam);
  const auto d = digest("alpha " + std::to_string(alpha) + " r' 4/3");

  bool inc64 = true;
  for (int K = 2; K <= std::min(64, c.demo_kmax); ++K)
    if (!(at.S[static_cast<std::size_t>(K - 1)] > at.S[static_cast<std::size_t>(K - 2)])) inc64 = false;
  CheckRecord a = check("strictly_increasing_to_64", d, at.S[63], at.S[0], 0.0, 0.0);
  a.pass = inc64;
  r.records.push_back(a);

  const double first = at.ladder[1].increment;
  double lowest = first;
  for (std::size_t i = 1; i < at.ladder.size(); ++i) lowest = std::min(lowest, at.ladder[i].increment);
  CheckRecord b = check("increment_above_half_of_first", d, lowest, 0.5 * first, 0.0, 0.0);
  b.pass = lowest >= 0.5 * first;
  b.extra = {{"fit_slope", at.fit_slope}, {"fit_r2", at.fit_r2}};
  r.records.push_back(b);

  const auto low = divergence_partial_sums(alpha - 0.2, rp, c.demo_kmax, fam);
  CheckRecord lo = check("lowered_alpha_increments_decay", digest("alpha lowered by 0.2"),
                         low.ladder.back().increment, low.ladder[1].increment, 0.0, 0.0);
  lo.pass = increments_decay(low, 1);
  lo.extra = {{"exponent", low.exponent}};
  r.records.push_back(lo);

  const auto high = divergence_partial_sums(alpha + 0.2, rp, c.demo_kmax, fam);
  CheckRecord hi = check("raised_alpha_increments_decay", digest("alpha raised by 0.2"),
                         high.ladder.back().increment, high.ladder[1].increment, 0.0, 0.0);
  hi.pass = increments_decay(high, 16);
  hi.extra = {{"exponent", high.exponent}};
  r.records.push_back(hi);
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "plancherel", "inversion", "square-integrability", "wigner-k", "weyl-product", "localization-weyl",
      "localization-product", "wclass", "moyal", "ft-recovery", "schatten", "unbounded-demo"};
  return names;
}

Report run_suite(const std::string& name, const SuiteConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  if (name == "plancherel") r = plancherel_suite(config);
  else if (name == "inversion") r = inversion_suite(config);
  else if (name == "square-integrability") r = square_integrability_suite(config);
  else if (name == "wigner-k") r = wigner_k_suite(config);
  else if (name == "weyl-product") r = weyl_product_suite(config);
  else if (name == "localization-weyl") r = localization_weyl_suite(config);
  else if (name == "localization-product") r = localization_product_suite(config);
  else if (name == "wclass") r = wclass_suite(config);
  else if (name == "moyal") r = moyal_suite(config);
  else if (name == "ft-recovery") r = ft_recovery_suite(config);
  else if (name == "schatten") r = schatten_suite_report(config);
  else if (name == "unbounded-demo") r = unbounded_suite(config);
  else throw Error(ErrorCode::UnknownSuite, name);
  r.config = config_to_json(config);
  if (config.timing) r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

struct Uniform {
  std::mt19937_64 rng;
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
};

GroupElement random_element(Uniform& u, int n, int m) {
  std::vector<double> q(static_cast<std::size_t>(n)), p(q.size()), t(static_cast<std::size_t>(m));
  for (auto& v : q) v = u(-3.0, 3.0);
  for (auto& v : p) v = u(-3.0, 3.0);
  for (auto& v : t) v = u(0.0, kTwoPi);
  return GroupElement(q, p, t);
}

double element_gap(const GroupElement& a, const GroupElement& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.q.size(); ++i) g = std::max({g, std::abs(a.q[i] - b.q[i]), std::abs(a.p[i] - b.p[i])});
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    const double d = std::remainder(a.t[i] - b.t[i], kTwoPi);
    g = std::max(g, std::abs(d));
  }
  return g;
}

}  // namespace

Report run_invariants(const SuiteConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r{"invariants", "group law, unitarity of pi_k, Parseval and Hermite orthonormality", {}, {}, -1.0};
  Uniform u{std::mt19937_64(config.seed)};
  const std::string sd = "seed " + std::to_string(config.seed);

  for (const char* preset : {"hr-1-1", "hr-2-2"}) {
    const auto fam = family_preset(preset);
    const auto e = GroupElement::identity(fam.n, fam.m);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto a = random_element(u, fam.n, fam.m);
      const auto b = random_element(u, fam.n, fam.m);
      const auto c = random_element(u, fam.n, fam.m);
      worst = std::max(worst, element_gap(multiply(multiply(a, b, fam), c, fam), multiply(a, multiply(b, c, fam), fam)));
      worst = std::max(worst, element_gap(multiply(e, a, fam), a));
      worst = std::max(worst, element_gap(multiply(a, inverse(a), fam), e));
      worst = std::max(worst, element_gap(multiply(inverse(a), a, fam), e));
    }
    r.records.push_back(check(std::string("group_axioms_") + preset, digest(sd), worst, 0.0, worst, 1e-12));
  }

  {
    const auto fam = build_family(1, 1);
    const auto xg = GridSpec::real(1, 10.0, 128);
    const double h = xg.axes[0].spacing();
    const auto phi = Field::sample(xg, [](std::span<const double> x) {
      return cplx(std::exp(-0.5 * (x[0] - 0.3) * (x[0] - 0.3)));
    });
    const FreqIndex k({2});
    double unit = 0.0, hom = 0.0;
    for (int i = 0; i < 100; ++i) {
      const GroupElement a({u(-2.0, 2.0)}, {std::floor(u(-8.0, 9.0)) * h}, {u(0.0, kTwoPi)});
      const GroupElement b({u(-2.0, 2.0)}, {std::floor(u(-8.0, 9.0)) * h}, {u(0.0, kTwoPi)});
      unit = std::max(unit, std::abs(norm(apply_rep(k, a, phi, fam)) - norm(phi)) / norm(phi));
      const auto lhs = apply_rep(k, a, apply_rep(k, b, phi, fam), fam);
      const auto rhs = apply_rep(k, multiply(a, b, fam), phi, fam);
      hom = std::max(hom, max_abs_diff(lhs, rhs));
    }
    r.records.push_back(check("unitarity", digest({&phi}, sd), unit, 0.0, unit, 1e-9));
    r.records.push_back(check("homomorphism", digest({&phi}, sd), hom, 0.0, hom, 1e-8));
  }

  {
    const auto g = GridSpec::real(2, 7.0, 32);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Field f(g);
      for (std::size_t j = 0; j < f.size(); ++j) f[j] = cplx(u(-1.0, 1.0), u(-1.0, 1.0));
      const double nf = norm(f);
      worst = std::max(worst, std::abs(norm(fourier_forward(f)) - nf) / nf);
      worst = std::max(worst, max_abs_diff(fourier_inverse(fourier_forward(f)), f) / max_abs(f));
    }
    r.records.push_back(check("parseval", digest(sd), worst, 0.0, worst, 1e-12));
  }

  {
    const auto g = GridSpec::real(1, 10.0, 512);
    double worst = 0.0;
    std::vector<Field> hs;
    for (int a = 0; a <= 8; ++a) hs.push_back(hermite_h(a, g));
    for (int a = 0; a <= 8; ++a)
      for (int b = 0; b <= 8; ++b)
        worst = std::max(worst, std::abs(inner(hs[static_cast<std::size_t>(a)], hs[static_cast<std::size_t>(b)]) -
                                         (a == b ? 1.0 : 0.0)));
    r.records.push_back(check("hermite_orthonormality", digest("degrees 0..8"), worst, 0.0, worst, 1e-9));
  }
  r.config = config_to_json(config);
  if (config.timing) r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string report_to_json(const Report& report) {
  ojson j;
  j["schema"] = 1;
  j["suite"] = report.suite;
  j["anchor"] = report.anchor;
  j["pass"] = report.pass();
  j["records"] = ojson::array();
  for (const auto& rec : report.records) {
    ojson o;
    o["name"] = rec.name;
    o["inputs_digest"] = rec.digest;
    o["lhs"] = rec.lhs;
    o["rhs"] = rec.rhs;
    o["rel_err"] = rec.rel_err;
    o["tolerance"] = rec.tolerance;
    o["pass"] = rec.pass;
    if (!rec.extra.empty()) {
      o["extra"] = ojson::object();
      for (const auto& [k, v] : rec.extra) o["extra"][k] = v;
    }
    j["records"].push_back(o);
  }
  j["config"] = report.config.empty() ? ojson::object() : ojson::parse(report.config);
  if (report.wall_seconds >= 0.0) j["wall_seconds"] = report.wall_seconds;
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  Report r;
  try {
    const auto j = ojson::parse(text);
    if (j.at("schema").get<int>() != 1) throw Error(ErrorCode::ConfigInvalid, "unsupported report schema");
    r.suite = j.at("suite").get<std::string>();
    r.anchor = j.at("anchor").get<std::string>();
    for (const auto& o : j.at("records")) {
      CheckRecord rec;
      rec.name = o.at("name").get<std::string>();
      rec.digest = o.at("inputs_digest").get<std::string>();
      rec.lhs = o.at("lhs").get<double>();
      rec.rhs = o.at("rhs").get<double>();
      rec.rel_err = o.at("rel_err").get<double>();
      rec.tolerance = o.at("tolerance").get<double>();
      rec.pass = o.at("pass").get<bool>();
      if (o.contains("extra"))
        for (const auto& [k, v] : o["extra"].items()) rec.extra.emplace_back(k, v.get<double>());
      r.records.push_back(rec);
    }
    const auto& cfg = j.at("config");
    r.config = cfg.empty() ? std::string() : cfg.dump();
    if (j.contains("wall_seconds")) r.wall_seconds = j["wall_seconds"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  return r;
}

std::string report_to_csv(const Report& report) {
  std::string out = "suite,name,inputs_digest,lhs,rhs,rel_err,tolerance,pass\n";
  char buf[256];
  for (const auto& rec : report.records) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%d\n", rec.lhs, rec.rhs, rec.rel_err, rec.tolerance,
                  rec.pass ? 1 : 0);
    out += report.suite + "," + rec.name + "," + rec.digest + buf;
  }
  return out;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoFailure, "cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
}

void emit_report(const Report& report, const std::string& format, const std::string& path) {
  if (format == "json") write_text(report_to_json(report), path);
  else if (format == "csv") write_text(report_to_csv(report), path);
  else throw Error(ErrorCode::ConfigInvalid, "unknown format " + format);
}

}  // namespace rhg
