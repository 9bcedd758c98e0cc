#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stripesim/eval.hpp"

namespace stripesim {

enum class SweepAxis { kNone, kFronthaul, kStripes, kTxPower, kAntennas };

std::string sweep_axis_name(SweepAxis axis);

struct ExperimentSpec {
  SystemConfig base;
  std::optional<int> total_aps;  // pinned when sweeping the stripe count
  SweepAxis sweep_axis = SweepAxis::kNone;
  std::vector<double> sweep_values;  // P_tx values are dBm
  std::vector<SchemeOptions> schemes;
  HybridMode hybrid = HybridMode::kOff;
  std::string output_path = "-";  // "-" means stdout

  void validate() const;
};

/// One CSV row: a (sweep value, scheme) cell averaged over the trials.
struct ExperimentRow {
  std::string sweep_axis;
  double sweep_value = 0.0;
  std::string scheme;
  std::string hybrid;
  double mean_sum_rate = 0.0;
  double std_sum_rate = 0.0;
  double mean_cutset = 0.0;
  double mean_fh_rate = 0.0;
  long overhead_reals = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> trial_sum_rates;  // per-trial detail, not in the CSV
};

/// Seed for an individual trial, derived so trial sets extend without
/// recomputation.
inline std::uint64_t trial_seed(std::uint64_t master, int trial) {
  return mix_seed(master, static_cast<std::uint64_t>(trial));
}

/// JSON config file -> spec. Unknown keys are rejected; an empty object
/// yields all defaults.
ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text);

/// Applies one sweep value to a copy of the base config.
SystemConfig apply_sweep(const ExperimentSpec& spec, double value);

/// Runs every (sweep value, scheme) cell over `trials` seeded scenario
/// draws. Deterministic given (spec, seed).
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

std::string csv_header();
std::string csv_line(const ExperimentRow& row);

/// Writes header + rows to spec.output_path ("-" = stdout).
void write_csv(const ExperimentSpec& spec,
               const std::vector<ExperimentRow>& rows);

}  // namespace stripesim
