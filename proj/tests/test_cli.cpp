#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rhg/cli.hpp"
#include "rhg/error.hpp"

using namespace rhg;

namespace {

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

TEST_CASE("config parsing and validation") {
  const auto c = config_from_json(R"({"n": 1, "m": 1, "grid": 32, "tol": {"plancherel": 1e-7}, "seed": 9})");
  CHECK(c.grid == 32);
  CHECK(c.seed == 9);
  CHECK(c.tolerance("plancherel", 1.0) == 1e-7);
  CHECK(c.tolerance("moyal", 0.5) == 0.5);

  CHECK(code_of([] { config_from_json(R"({"grid": 33})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { config_from_json(R"({"tol": {"moyal": -1}})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { config_from_json(R"({"kmax": 0})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { config_from_json(R"({"colour": 1})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { config_from_json(R"({"grid": "many"})"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { config_from_json("[1, 2"); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { load_config("/nonexistent/rhg.json"); }) == ErrorCode::IoFailure);

  // The echo parses back to the same config.
  const auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("suite dispatch") {
  CHECK(suite_names().size() == 12);
  CHECK(code_of([] { run_suite("nosuch", SuiteConfig{}); }) == ErrorCode::UnknownSuite);
  SuiteConfig two;
  two.n = 2;
  two.m = 2;
  CHECK(code_of([&] { run_suite("plancherel", two); }) == ErrorCode::ConfigInvalid);
  SuiteConfig bad;
  bad.family = "hr-2-2";
  CHECK(code_of([&] { run_suite("square-integrability", bad); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("plancherel suite passes and is deterministic") {
  const SuiteConfig c;
  const auto a = run_suite("plancherel", c);
  CHECK(a.pass());
  CHECK(a.wall_seconds < 0.0);
  REQUIRE(!a.records.empty());
  CHECK(a.records[0].rel_err <= 1e-6);
  CHECK(report_to_json(a) == report_to_json(run_suite("plancherel", c)));
  CHECK(a.anchor.find("Plancherel") != std::string::npos);

  SuiteConfig strict = c;
  strict.tol["plancherel"] = 1e-300;
  CHECK_FALSE(run_suite("plancherel", strict).pass());

  SuiteConfig timed = c;
  timed.timing = true;
  const auto t = run_suite("plancherel", timed);
  CHECK(t.wall_seconds >= 0.0);
  CHECK(report_to_json(t).find("wall_seconds") != std::string::npos);
}

TEST_CASE("unbounded demo suite") {
  const auto r = run_suite("unbounded-demo", SuiteConfig{});
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].name == "strictly_increasing_to_64");
  CHECK(r.records[0].pass);
  CHECK(r.records[1].pass);
  CHECK(r.records[3].pass);
  // Lowering alpha moves further into the divergent regime, so the
  // increments grow instead of decaying.
  CHECK(r.records[2].name == "lowered_alpha_increments_decay");
  CHECK_FALSE(r.records[2].pass);
  CHECK(r.records[2].lhs > r.records[2].rhs);
  CHECK_FALSE(r.pass());
}

TEST_CASE("square integrability for n = m = 2") {
  SuiteConfig c;
  c.n = 2;
  c.m = 2;
  c.grid = 32;
  c.extent = 7.0;
  const auto r = run_suite("square-integrability", c);
  CHECK(r.records.size() == 3);
  CHECK(r.pass());
}

TEST_CASE("invariants") {
  const auto r = run_invariants(SuiteConfig{});
  CHECK(r.records.size() == 6);
  CHECK(r.pass());
}

TEST_CASE("report emission") {
  Report empty{"plancherel", "anchor", {}, {}, -1.0};
  CHECK(empty.pass());
  const auto ej = report_to_json(empty);
  CHECK(ej.find("\"schema\": 1") != std::string::npos);
  CHECK(report_from_json(ej) == empty);
  CHECK(report_to_csv(empty) == "suite,name,inputs_digest,lhs,rhs,rel_err,tolerance,pass\n");

  const auto r = run_suite("inversion", SuiteConfig{});
  const auto text = report_to_json(r);
  CHECK(report_from_json(text) == r);
  CHECK(report_to_json(report_from_json(text)) == text);

  const auto csv = report_to_csv(r);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.records.size() + 1);

  const auto dir = std::filesystem::temp_directory_path() / "rhg_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "r.json").string();
  emit_report(r, "json", path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == text);
  std::filesystem::remove_all(dir);

  CHECK(code_of([&] { emit_report(r, "json", "/nonexistent/dir/r.json"); }) == ErrorCode::IoFailure);
  CHECK(code_of([&] { emit_report(r, "xml", ""); }) == ErrorCode::ConfigInvalid);
  CHECK(code_of([] { report_from_json(R"({"schema": 2})"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("digest") {
  Field a(GridSpec::real(1, 1.0, 4));
  Field b = a;
  b[1] = 1e-300;
  CHECK(digest({&a}, "x") == digest({&a}, "x"));
  CHECK(digest({&a}, "x") != digest({&b}, "x"));
  CHECK(digest({&a}, "x") != digest({&a}, "y"));
  CHECK(digest("x").size() == 16);
}
