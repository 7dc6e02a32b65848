#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varcharts/calibrate.hpp"
#include "varcharts/charts.hpp"
#include "varcharts/experiments.hpp"
#include "varcharts/process.hpp"

namespace varcharts {

/// Flat run configuration, populated from CLI flags / the config file.
/// validate() is total: every derived object is constructed and checked
/// before any simulation starts.
struct RunConfig {
  // process.*
  std::string kind = "auto";  // ar1 | ar2 | arma | auto (inferred from sizes)
  std::vector<double> phi;
  std::vector<double> theta;
  double sigma2 = 1.0;
  double mu = 0.0;

  // change.*
  double delta = 1.0;
  std::int64_t tau = 0;  // 0 = no change (infinity)

  // chart.*
  std::string scheme;
  std::optional<double> delta_star;
  std::optional<double> limit;
  std::int64_t glr_window = 0;

  // sim.*
  std::int64_t reps = 0;  // 0 = auto: 100000 (10000 for glr)
  std::int64_t cap = 0;   // 0 = auto: 100 * target_arl
  std::uint64_t seed = 1;
  int workers = 0;        // 0 = hardware concurrency

  // calibrate.*
  double target_arl = 500.0;
  double rel_tol = 0.005;

  // output.*
  std::string out_dir = "results";
  std::string format = "csv";

  // experiment grids (table / sensitivity / delay subcommands)
  std::vector<double> phis;
  std::vector<double> deltas;
  std::vector<double> delta_stars;
  std::vector<std::string> schemes;
  std::int64_t tau_max = 50;
  std::string table_mode = "arl";  // arl | delay

  ProcessSpec process() const;
  ChangeSpec change() const;
  ChartConfig chart() const;
  CalibrationTarget calibration_target() const;
  SimOptions sim_options() const;
  ExperimentGrid experiment_grid() const;
  std::int64_t effective_reps() const;

  void validate() const;

  /// Canonical key=value serialization (one line) and its FNV-1a hash,
  /// recorded with every result row so a row can be regenerated exactly.
  std::string canonical() const;
  std::string config_hash() const;
};

}  // namespace varcharts
