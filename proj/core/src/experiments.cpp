#include "varcharts/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace varcharts {

namespace {

struct ArmedChart {
  ChartConfig config;  // limit filled in
  CalibrationResult calibration;
};

// One calibrated configuration per applicable delta_star.
std::vector<ArmedChart> armed_charts(ChartScheme scheme,
                                     const std::vector<double>& delta_stars,
                                     const ProcessSpec& spec,
                                     const CalibrationTarget& target,
                                     std::int64_t reps, LimitCache* cache) {
  CalibrationTarget t = target;
  t.reps = reps;
  std::vector<ArmedChart> armed;
  if (scheme_uses_reference(scheme)) {
    for (double star : delta_stars) {
      ChartConfig config{scheme, star, std::nullopt, 0};
      CalibrationResult cal = resolve_limit(config, spec, t, cache);
      config.limit = cal.limit;
      armed.push_back({config, std::move(cal)});
    }
  } else {
    ChartConfig config{scheme, std::nullopt, std::nullopt, 0};
    CalibrationResult cal = resolve_limit(config, spec, t, cache);
    config.limit = cal.limit;
    armed.push_back({config, std::move(cal)});
  }
  return armed;
}

// Out-of-control estimates use the substream family (seed + 1, r) so they are
// independent of the calibration draws.
SimOptions eval_options(const CalibrationTarget& target, std::int64_t reps) {
  return {reps, target.seed + 1, target.effective_cap(), target.workers};
}

}  // namespace

ExperimentGrid ExperimentGrid::defaults() {
  ExperimentGrid g;
  for (int i = 0; i <= 9; ++i) g.phis.push_back(i / 10.0);
  g.deltas = {1.1, 1.2, 1.3, 1.4, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
  g.delta_stars = {1.10, 1.20, 1.30, 1.40, 1.50, 1.75, 2.00, 2.25, 2.50, 2.75, 3.00};
  g.schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
  return g;
}

std::vector<TableCell> run_arl_table(const ExperimentGrid& grid,
                                     const CalibrationTarget& target,
                                     LimitCache* cache) {
  std::vector<TableCell> cells;
  for (ChartScheme scheme : grid.schemes) {
    const std::int64_t reps = grid.reps_for(scheme);
    for (double phi : grid.phis) {
      const ProcessSpec spec = ProcessSpec::ar1(phi, grid.sigma2, grid.mu);
      const auto armed = armed_charts(scheme, grid.delta_stars, spec, target,
                                      reps, cache);
      const SimOptions options = eval_options(target, reps);
      for (double delta : grid.deltas) {
        TableCell cell{scheme, phi, delta, std::nullopt, 0.0, 0.0, false};
        bool first = true;
        for (const auto& ac : armed) {
          const ArlEstimate est = estimate_arl(
              ac.config, spec, ChangeSpec::at(1, delta), options);
          if (first || est.mean < cell.arl) {
            cell.arl = est.mean;
            cell.std_err = est.std_err;
            cell.best_delta_star = ac.config.delta_star;
            first = false;
          }
        }
        cells.push_back(cell);
      }
    }
  }
  // Bold-marking rule: within 2% (inclusive) of the column minimum.
  std::map<std::pair<double, double>, double> col_min;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.phi, c.delta);
    auto it = col_min.find(key);
    if (it == col_min.end() || c.arl < it->second) col_min[key] = c.arl;
  }
  for (auto& c : cells) {
    c.within_2pct = c.arl <= 1.02 * col_min[std::make_pair(c.phi, c.delta)];
  }
  return cells;
}

std::vector<SensitivityPoint> run_sensitivity(const ExperimentGrid& grid,
                                              double phi, double delta,
                                              const CalibrationTarget& target,
                                              LimitCache* cache) {
  const ProcessSpec spec = ProcessSpec::ar1(phi, grid.sigma2, grid.mu);
  std::vector<SensitivityPoint> points;
  for (ChartScheme scheme : grid.schemes) {
    const std::int64_t reps = grid.reps_for(scheme);
    const auto armed = armed_charts(scheme, grid.delta_stars, spec, target,
                                    reps, cache);
    const SimOptions options = eval_options(target, reps);
    for (const auto& ac : armed) {
      const ArlEstimate est =
          estimate_arl(ac.config, spec, ChangeSpec::at(1, delta), options);
      points.push_back({scheme, ac.config.delta_star, est.mean, est.std_err});
    }
  }
  return points;
}

std::vector<DelayRow> run_delay_table(const ExperimentGrid& grid, double phi,
                                      std::int64_t tau_max,
                                      const CalibrationTarget& target,
                                      LimitCache* cache) {
  if (tau_max < 1) throw ValidationError("tau_max must be >= 1");
  const ProcessSpec spec = ProcessSpec::ar1(phi, grid.sigma2, grid.mu);
  std::vector<DelayRow> rows;
  for (ChartScheme scheme : grid.schemes) {
    const std::int64_t reps = grid.reps_for(scheme);
    const auto armed = armed_charts(scheme, grid.delta_stars, spec, target,
                                    reps, cache);
    const SimOptions options = eval_options(target, reps);
    for (double delta : grid.deltas) {
      // Optimal reference parameter: argmin of the out-of-control ARL.
      const ArmedChart* best = nullptr;
      ArlEstimate best_est;
      for (const auto& ac : armed) {
        const ArlEstimate est =
            estimate_arl(ac.config, spec, ChangeSpec::at(1, delta), options);
        if (best == nullptr || est.mean < best_est.mean) {
          best = &ac;
          best_est = est;
        }
      }
      const auto [tau_worst, worst] =
          worst_delay(best->config, spec, delta, tau_max, options);
      const DelayEstimate at_max =
          tau_max == 1 ? worst
                       : estimate_delay(best->config, spec, delta, tau_max, options);
      rows.push_back({scheme, phi, delta, best->config.delta_star,
                      best_est.mean, best_est.std_err, worst.mean_delay,
                      worst.std_err, tau_worst, at_max.mean_delay,
                      at_max.std_err, tau_max});
    }
  }
  return rows;
}

}  // namespace varcharts
