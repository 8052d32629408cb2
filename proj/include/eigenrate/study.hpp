#pragma once

#include "eigenrate/rates.hpp"

#include <map>
#include <string>

namespace eigenrate {

/// Declarative study description parsed from a flat key-value config file
/// with [section] headers. Unknown sections or keys are rejected.
struct StudyConfig {
  // [study]
  std::string kind;             // laplace-1d | laplace-2d | beam | approx | reliability | spectrum
  std::string family = "p1";
  std::string name;             // output base name; defaults to kind-family
  std::string domain = "";      // spectrum study: interval | square | beam
  long seed = 1;

  // [mesh]
  int cells0 = 8;
  int levels = 4;
  int refine = 2;
  double grading = 1.0;
  double grading_y = 1.0;
  std::string mesh2d = "";      // tri | quad (default chosen by family)
  std::string split = "fixed";  // fixed | alternating
  int ny = 4;                   // approx study: cells in the frozen direction
  std::vector<int> cells_list;  // reliability study level list

  // [eigen]
  std::vector<int> modes = {1};
  int count = 20;
  int window = 0;  // reliability: discrete eigenvalues per level (0 = auto)

  // [norms]
  std::vector<std::pair<int, double>> norm_pairs = {{0, 2.0}, {1, 2.0}};

  // [limits]
  int max_free_dofs = 4096;
  std::string method = "auto";  // auto | dense | shift-invert
  double lambda_h2_cap = 0.1;

  // [target]
  std::string target = "x3";  // x3 | x4 | sin

  // [tolerance]
  double tol_value = 0.01;
  std::string tol_mode = "relative";

  // [gates] name -> parameters (interpretation depends on the study kind)
  std::map<std::string, std::vector<double>> gates;

  // [output]
  std::string out_dir = "";
  bool dump_matrices = false;
  bool dump_mesh = false;

  void validate() const;
};

StudyConfig parse_config_text(const std::string& text);
StudyConfig parse_config_file(const std::string& path);

struct GateResult {
  std::string name;
  double measured = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

/// One row of a study table: mesh level x tracked mode.
struct ErrorRecord {
  double h = 0.0, h1 = 0.0, h2 = 0.0;
  int n_free = 0;
  int mode = 1;
  double lambda = 0.0, lambda_h = 0.0;
  std::map<std::string, double> values;
};

struct StudyReport {
  std::string schema = "eigenrate/v1";
  std::map<std::string, std::string> config_echo;
  std::vector<ErrorRecord> records;
  std::map<std::string, RateFit> fits;
  ReliabilityReport rel;
  bool has_reliability = false;
  std::vector<GateResult> gates;
  bool pass = true;
  std::vector<std::pair<std::string, double>> timings;  // kept out of the JSON
};

/// Runs a validated study. Deterministic for a given config; levels may be
/// processed concurrently when `threads` > 1 (results are merged in level
/// order, so the report bytes do not depend on the thread count).
StudyReport run_study(const StudyConfig& cfg, int threads = 0);

/// Canonical JSON serialization (sorted keys, shortest round-trip numbers).
std::string report_to_json(const StudyReport& report);
StudyReport report_from_json(const std::string& text);

/// Writes <name>.json/.csv/.dat/.gp and <name>_timings.txt atomically.
void emit_report(const StudyReport& report, const StudyConfig& cfg, const std::string& out_dir);

/// Thread count from EIGENRATE_THREADS (0 = sequential reference mode).
int threads_from_env();

}  // namespace eigenrate
