#pragma once

// Scenario runner behind the command line tool. A scenario is described by
// an INI-style config (see docs/config.md), produces a JSON report, a CSV
// summary and optionally a per-node traction dump.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cstress/constitutive.hpp"
#include "cstress/geometry.hpp"
#include "cstress/tractions.hpp"

namespace cstress {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { kVerifyIdentities, kCompareBc, kMissingTermMap, kSolve, kPatchTest };

std::string to_string(ScenarioKind k);

/// Highest polynomial degree accepted for field literals and random fields.
inline constexpr int kFieldDegreeCap = 6;

struct ScenarioConfig {
  std::string path;
  ScenarioKind scenario = ScenarioKind::kVerifyIdentities;
  std::uint64_t seed = 0;

  DomainSpec domain;
  bool order_given = false;
  MaterialParams material;

  /// Raw field literals keyed by u, du, f, u0. Values are polynomial
  /// literals, "random:<degree>", or "manufactured" (f only).
  std::map<std::string, std::string> fields;

  int cases = 0;                 // verify-identities and patch-test: random case count
  int basis_degree = 3;          // solve
  TractionFlavor flavor = TractionFlavor::kCorrected;
  int perturbations = 100;       // solve: feasible perturbations for the minimality spot check
  std::optional<Mat3> strain;    // patch-test: symmetric A in u = A x

  std::string out_dir = "out";
  bool dump_tractions = false;
  std::map<std::string, double> tolerance;
};

/// Throws ConfigError with "path:line: message" for malformed input.
ScenarioConfig parse_config(std::istream& in, const std::string& path);
ScenarioConfig load_config(const std::string& path);

/// One asserted tolerance. Upper-bound checks pass when
/// |actual - expected| <= tolerance; lower-bound checks pass when
/// |actual| > tolerance.
struct Check {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false;
  bool pass = false;
};

struct ScenarioResult {
  nlohmann::ordered_json report;
  /// Deterministic (name, value) rows for summary.csv.
  std::vector<std::pair<std::string, double>> summary;
  std::vector<Check> checks;
  std::vector<TractionSample> tractions;

  bool pass() const;
  std::vector<Check> failures() const;
};

/// Upper-bound tolerances are multiplied by tol_scale; lower bounds are not.
ScenarioResult run_scenario(const ScenarioConfig& config, double tol_scale = 1.0);

/// Writes report.json, summary.csv and (if requested) tractions.csv.
void write_outputs(const ScenarioResult& result, const ScenarioConfig& config, const std::string& dir);

/// summary.csv body without the timestamp line.
std::string summary_body(const ScenarioResult& result);

}  // namespace cstress
