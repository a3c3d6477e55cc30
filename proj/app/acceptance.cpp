// Runs the twelve acceptance criteria and prints one line per criterion.
// Exit code 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rhg/cli.hpp"
#include "rhg/error.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Worst record and the names of failing ones.
Outcome summarize(const std::vector<rhg::Report>& reports) {
  Outcome o{true, {}};
  double worst = 0.0;
  std::string failed;
  for (const auto& r : reports) {
    for (const auto& rec : r.records) {
      if (rec.tolerance > 0.0) worst = std::max(worst, rec.rel_err);
      if (!rec.pass) {
        o.pass = false;
        failed += (failed.empty() ? "" : ", ") + r.suite + "/" + rec.name;
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst rel_err %.2e", worst);
  o.detail = buf;
  if (!failed.empty()) o.detail += "; failed: " + failed;
  return o;
}

Outcome suites(std::initializer_list<const char*> names, const rhg::SuiteConfig& cfg, double budget = 0.0) {
  const auto t0 = Clock::now();
  std::vector<rhg::Report> reports;
  for (const char* n : names) reports.push_back(rhg::run_suite(n, cfg));
  Outcome o = summarize(reports);
  if (budget > 0.0) {
    const double s = seconds_since(t0);
    char buf[96];
    std::snprintf(buf, sizeof buf, "; runtime %.1f s (limit %.0f s)", s, budget);
    o.detail += buf;
    if (s >= budget) o.pass = false;
  }
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const rhg::SuiteConfig cfg;
  const auto start = Clock::now();

  const std::vector<Criterion> criteria{
      {1, "Plancherel", [&] { return suites({"plancherel"}, cfg, 10.0); }},
      {2, "inversion round trip and trace identity", [&] { return suites({"inversion"}, cfg); }},
      {3, "square integrability, k = 1, 2, 3", [&] { return suites({"square-integrability"}, cfg); }},
      {4, "Gaussian k-Wigner closed form", [&] { return suites({"wigner-k"}, cfg); }},
      {5, "localization as k-Weyl transform", [&] { return suites({"localization-weyl"}, cfg); }},
      {6, "k-Weyl product", [&] { return suites({"weyl-product"}, cfg); }},
      {7, "localization product formula", [&] { return suites({"localization-product"}, cfg); }},
      {8, "counterexample shape and W_c ladder", [&] { return suites({"wclass"}, cfg); }},
      {9, "Moyal identity and Fourier recovery on G", [&] { return suites({"moyal", "ft-recovery"}, cfg); }},
      {10, "Schatten S_2 equality and S_1 bound", [&] { return suites({"schatten"}, cfg); }},
      {11, "unboundedness demonstration", [&] { return suites({"unbounded-demo"}, cfg, 60.0); }},
      {12, "randomized invariants and total runtime",
       [&] {
         Outcome o = summarize({rhg::run_invariants(cfg)});
         const double total = seconds_since(start);
         char buf[96];
         std::snprintf(buf, sizeof buf, "; full run %.1f s (limit 600 s)", total);
         o.detail += buf;
         if (total >= 600.0) o.pass = false;
         return o;
       }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const rhg::Error& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
