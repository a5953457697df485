#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hiacc/oracles.hpp"
#include "hiacc/potential.hpp"
#include "hiacc/sampler.hpp"

namespace hiacc {

inline constexpr int kReportSchemaVersion = 1;

enum class ExperimentKind { TiltExactness, ProxCheck, ForsUnit, SamplerE2E, DeltaScaling, LowerBound };
const char* to_string(ExperimentKind kind);
std::vector<std::string> experiment_catalog();

/// A parsed and validated experiment description. Construct only through
/// validate_config.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::SamplerE2E;
  PotentialSpec potential{"gaussian", {}, {}};
  std::string noise_key = "exact";
  std::map<std::string, double> noise_params;
  AssumptionCase assumption = AssumptionCase::lsi(1.0, 0.0);
  Mode mode = Mode::FirstOrder;
  double delta = 0.05;
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds{1};
  std::uint64_t chains = 1000;
  unsigned threads = 0;
  std::string output_dir = "hiacc-out";
  PlanConstants constants{};

  // Initial law N(init_mean, init_sd^2 I) for sampler runs.
  double init_mean = 0.0;
  double init_sd = 1.0;

  // Tilt and prox settings.
  std::vector<double> x0{1.0};
  std::optional<double> eta;
  double fors_B = 1.0;
  std::uint64_t samples = 100000;
  bool plan_tilt = false;
  double prox_M = 1.0;
  std::uint64_t prox_batch = 1;
  std::optional<std::uint64_t> prox_iters;
  std::uint64_t trials = 1000;

  // Rejection-sampler unit: constant estimator value and call count.
  double w_value = 0.0;
  double wdraw_delta = 0.01;

  // Scaling sweep expectation: "linear", "polylog" or "none".
  std::string expect = "none";

  // Lower bound.
  std::string psi_kind = "power";
  double psi_s = 2.0;
  double sgld_step = 0.5;

  /// The JSON the config was parsed from, re-serialized with defaults filled.
  std::string echo;
};

/// Parses JSON text and validates every field, collecting all problems into a
/// single ValidationError (each message starts with the field path).
ExperimentConfig validate_config(const std::string& raw);

/// Applies CLI overrides; chains == 0 and an empty seed list leave values as
/// they are.
void apply_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<std::uint64_t> chains);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CsvRow {
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::string metric;
  double value = 0.0;
};

struct ExperimentReport {
  std::string json;  // full report document
  std::vector<CsvRow> rows;
  std::vector<Verdict> verdicts;
  QueryLedger ledger;
  bool all_pass() const;
  /// "seed,delta,metric,value" with a header line.
  std::string csv() const;
};

/// Dispatches to the named suite. Per-seed failures are recorded in the report
/// as failed verdicts and the remaining seeds still run.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes report.json and results.csv into `dir`, creating it if needed.
void write_report(const ExperimentReport& report, const std::string& dir);

/// Output directory: explicit value, else $HIACC_OUT_DIR, else the config's.
std::string resolve_output_dir(const std::optional<std::string>& flag,
                               const ExperimentConfig& cfg);

}  // namespace hiacc
