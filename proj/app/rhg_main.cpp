#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "rhg/algebra.hpp"
#include "rhg/cli.hpp"
#include "rhg/error.hpp"
#include "rhg/weyl_G.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> n, m, grid, kmax;
  std::optional<double> extent, tol;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  bool timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--n", o.n, "dimension n");
  cmd->add_option("--m", o.m, "center dimension m");
  cmd->add_option("--grid", o.grid, "points per real axis");
  cmd->add_option("--extent", o.extent, "half extent of the x grid");
  cmd->add_option("--kmax", o.kmax, "k ranges over +-1 .. +-kmax");
  cmd->add_option("--tol", o.tol, "tolerance for this suite");
  cmd->add_option("--seed", o.seed, "seed for randomized cases");
  cmd->add_option("--out", o.out, "output file (stdout if omitted)");
  cmd->add_flag("--timing", o.timing, "include wall time in the report");
}

rhg::SuiteConfig resolve(const Overrides& o, const std::string& suite) {
  rhg::SuiteConfig c = o.config_path.empty() ? rhg::SuiteConfig{} : rhg::load_config(o.config_path);
  if (o.n) c.n = *o.n;
  if (o.m) c.m = *o.m;
  if (o.grid) c.grid = *o.grid;
  if (o.extent) c.extent = *o.extent;
  if (o.kmax) c.kmax = *o.kmax;
  if (o.tol) c.tol[suite] = *o.tol;
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.out = o.out;
  c.timing = o.timing;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic analysis on the reduced Heisenberg group with multidimensional center"};
  app.require_subcommand(1);

  Overrides so;
  std::string suite_name;
  auto* suite = app.add_subcommand("suite", "run a verification suite; exit code 0 iff every check passes");
  suite->add_option("name", suite_name, "suite name")->required();
  suite->add_option("--format", so.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  add_common(suite, so);

  Overrides dov;
  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "demonstrations; 'demo unbounded' prints the S(K) table as CSV");
  demo->add_option("name", demo_name, "demo name")->required()->check(CLI::IsMember({"unbounded"}));
  double alpha_shift = 0.0;
  int demo_kmax = 128;
  demo->add_option("--alpha-shift", alpha_shift, "offset added to alpha = 1/r' - 1");
  demo->add_option("--demo-kmax", demo_kmax, "largest K of the ladder");
  add_common(demo, dov);

  app.add_subcommand("list", "list suite names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) {
      for (const auto& n : rhg::suite_names()) std::cout << n << "\n";
      return 0;
    }
    if (app.got_subcommand("suite")) {
      const auto cfg = resolve(so, suite_name);
      const auto report = rhg::run_suite(suite_name, cfg);
      rhg::emit_report(report, so.format, cfg.out);
      return report.pass() ? 0 : 1;
    }
    const auto cfg = resolve(dov, "unbounded-demo");
    const auto fam = cfg.family.empty() ? rhg::build_family(cfg.n, cfg.m) : rhg::family_preset(cfg.family);
    const double rp = 4.0 / 3.0;
    const auto rep = rhg::divergence_partial_sums(1.0 / rp - 1.0 + alpha_shift, rp, demo_kmax, fam);
    rhg::write_text(rhg::divergence_csv(rep), cfg.out);
    return rep.strictly_increasing ? 0 : 1;
  } catch (const rhg::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
