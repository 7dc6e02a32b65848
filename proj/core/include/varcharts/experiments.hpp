#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "varcharts/calibrate.hpp"
#include "varcharts/charts.hpp"
#include "varcharts/process.hpp"
#include "varcharts/runlength.hpp"

namespace varcharts {

/// Comparison-study grid over AR(1) targets.  Reference-value schemes are
/// minimized over delta_stars; the generalized schemes ignore that axis.
/// Control limits are resolved through the cache (one calibration per
/// (scheme, delta_star, phi)); out-of-control estimates reuse the calibration
/// replication budget, with the GLR chart dropped to glr_reps.
struct ExperimentGrid {
  std::vector<double> phis;
  std::vector<double> deltas;
  std::vector<double> delta_stars;
  std::vector<ChartScheme> schemes;
  double sigma2 = 1.0;
  double mu = 0.0;
  std::int64_t reps = 100000;
  std::int64_t glr_reps = 10000;

  static ExperimentGrid defaults();
  std::int64_t reps_for(ChartScheme scheme) const {
    return scheme == ChartScheme::kGlr ? glr_reps : reps;
  }
};

struct TableCell {
  ChartScheme scheme;
  double phi;
  double delta;
  std::optional<double> best_delta_star;  // argmin for reference schemes
  double arl;
  double std_err;
  bool within_2pct;  // arl <= 1.02 * column minimum (inclusive)
};

std::vector<TableCell> run_arl_table(const ExperimentGrid& grid,
                                     const CalibrationTarget& target,
                                     LimitCache* cache);

/// One ARL per (reference scheme, delta_star), plus a single
/// delta_star-independent level per generalized scheme.
struct SensitivityPoint {
  ChartScheme scheme;
  std::optional<double> delta_star;
  double arl;
  double std_err;
};

std::vector<SensitivityPoint> run_sensitivity(const ExperimentGrid& grid,
                                              double phi, double delta,
                                              const CalibrationTarget& target,
                                              LimitCache* cache);

/// Per (scheme, delta): run length at tau = 1, the worst conditional delay
/// over tau in 1..tau_max, and the delay at tau = tau_max.  Reference schemes
/// use the delta_star minimizing their out-of-control ARL.
struct DelayRow {
  ChartScheme scheme;
  double phi;
  double delta;
  std::optional<double> delta_star;
  double arl;
  double arl_std_err;
  double worst_delay;
  double worst_std_err;
  std::int64_t tau_worst;
  double delay_at_tau_max;
  double delay_std_err;
  std::int64_t tau_max;
};

std::vector<DelayRow> run_delay_table(const ExperimentGrid& grid, double phi,
                                      std::int64_t tau_max,
                                      const CalibrationTarget& target,
                                      LimitCache* cache);

}  // namespace varcharts
