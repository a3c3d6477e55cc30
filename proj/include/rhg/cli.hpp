#pragma once

// Suite configuration, the verification suites and report emission.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rhg/fields.hpp"

namespace rhg {

struct SuiteConfig {
  int n = 1;
  int m = 1;
  std::string family;  // preset name; empty means build_family(n, m)
  int grid = 64;       // x-grid points per axis
  double extent = 8.0;
  int torus = 32;
  int kmax = 8;        // k ranges over +-1 .. +-kmax
  std::uint64_t seed = 1;
  std::map<std::string, double> tol;  // per-suite override of the default tolerance
  // Grids over G for the dense Wigner and kernel suites.
  int g_grid = 24;
  double g_extent = 6.0;
  int g_torus = 4;
  int kernel_grid = 20;
  double kernel_extent = 5.0;
  int symbols = 10;
  int demo_kmax = 128;
  std::string out;
  bool timing = false;

  void validate() const;
  double tolerance(const std::string& suite, double fallback) const;
};

SuiteConfig config_from_json(const std::string& text);
SuiteConfig load_config(const std::string& path);
std::string config_to_json(const SuiteConfig& config);

struct CheckRecord {
  std::string name;
  std::string digest;  // FNV-1a of the inputs
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> extra;

  bool operator==(const CheckRecord&) const = default;
};

struct Report {
  std::string suite;
  std::string anchor;  // the theorem the suite exercises
  std::vector<CheckRecord> records;
  std::string config;  // echo, as JSON
  double wall_seconds = -1.0;  // emitted only when non-negative

  bool pass() const;
  bool operator==(const Report&) const = default;
};

const std::vector<std::string>& suite_names();
Report run_suite(const std::string& name, const SuiteConfig& config);
/// Group axioms, unitarity, Parseval and orthonormality on seeded samples.
Report run_invariants(const SuiteConfig& config);

std::string report_to_json(const Report& report);
Report report_from_json(const std::string& text);
std::string report_to_csv(const Report& report);
/// Writes to path, or to stdout when path is empty.
void emit_report(const Report& report, const std::string& format, const std::string& path);
void write_text(const std::string& text, const std::string& path);

/// FNV-1a over the samples of the fields and a parameter string.
std::string digest(std::initializer_list<const Field*> fields, const std::string& params = {});
std::string digest(const std::string& params);

}  // namespace rhg
