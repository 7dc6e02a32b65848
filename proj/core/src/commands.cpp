#include "varcharts/commands.hpp"

#include <cstdio>
#include <sstream>

#include "varcharts/version.hpp"

namespace varcharts {

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string opt6(const std::optional<double>& v) { return v ? g6(*v) : ""; }

double phi1_of(const ProcessSpec& spec) {
  return spec.phi.empty() ? 0.0 : spec.phi[0];
}

// The limit used by arl/delay: explicit --limit wins, else the cache.
double resolve_existing_limit(const RunConfig& config, const ChartConfig& chart,
                              const ProcessSpec& process, ResultsStore& store) {
  if (chart.limit) return *chart.limit;
  const auto hit = store.lookup(chart, process, config.calibration_target());
  if (!hit) {
    throw ValidationError(
        "no calibrated limit in the cache for this configuration; "
        "run `varcharts calibrate` with the same flags first, or pass --limit");
  }
  return hit->limit;
}

constexpr const char* kCalibrationsHeader =
    "scheme,phi,delta_star,process,target_arl,rel_tol,reps,seed,cap,c,"
    "achieved_arl,std_err,censored,iterations,c_full,achieved_arl_full,"
    "std_err_full,config_hash,version";

constexpr const char* kArlHeader =
    "scheme,phi,delta,delta_star,c,arl,std_err,reps,censored,seed,c_full,"
    "arl_full,std_err_full,config_hash,version";

constexpr const char* kDelayHeader =
    "scheme,phi,delta,delta_star,c,delay,std_err,reps,censored,tau,seed,"
    "c_full,delay_full,std_err_full,config_hash,version";

constexpr const char* kTableHeader =
    "scheme,phi,delta,best_delta_star,arl,se,within_2pct,arl_full,se_full,"
    "config_hash,seed,version";

constexpr const char* kDelayTableHeader =
    "scheme,phi,delta,delta_star,arl,arl_se,worst_delay,worst_se,tau_worst,"
    "delay_at_tau_max,delay_se,tau_max,config_hash,seed,version";

constexpr const char* kSensitivityHeader =
    "scheme,delta_star,arl,se,phi,delta,arl_full,se_full,config_hash,seed,"
    "version";

}  // namespace

int cmd_calibrate(const RunConfig& config, ResultsStore& store,
                  std::ostream& out) {
  config.validate();
  const ProcessSpec process = config.process();
  const ChartConfig chart = config.chart();
  const CalibrationTarget target = config.calibration_target();

  const CalibrationResult result = resolve_limit(chart, process, target, &store);

  std::ostringstream row;
  row << to_string(chart.scheme) << ',' << g6(phi1_of(process)) << ','
      << opt6(chart.delta_star) << ',' << process.fingerprint() << ','
      << g6(target.target_arl) << ',' << g6(target.rel_tol) << ','
      << target.reps << ',' << target.seed << ',' << target.effective_cap()
      << ',' << g6(result.limit) << ',' << g6(result.achieved.mean) << ','
      << g6(result.achieved.std_err) << ',' << result.achieved.censored << ','
      << result.iterations << ',' << g17(result.limit) << ','
      << g17(result.achieved.mean) << ',' << g17(result.achieved.std_err)
      << ',' << config.config_hash() << ',' << kVersion;
  store.append_row("calibrations.csv", kCalibrationsHeader, row.str());

  out << "calibrate scheme=" << to_string(chart.scheme);
  if (chart.delta_star) out << " delta_star=" << g6(*chart.delta_star);
  out << " phi=" << g6(phi1_of(process)) << " target_arl="
      << g6(target.target_arl) << "\n  limit=" << g17(result.limit)
      << (scheme_uses_log_limit(chart.scheme) ? " (log scale)" : "")
      << "\n  achieved_arl=" << g6(result.achieved.mean) << " (se "
      << g6(result.achieved.std_err) << ", " << result.iterations
      << " iterations, " << result.achieved.censored << " censored)\n";
  if (!result.achieved.warning.empty()) {
    out << "  warning: " << result.achieved.warning << "\n";
  }
  return 0;
}

int cmd_arl(const RunConfig& config, ResultsStore& store, std::ostream& out) {
  config.validate();
  const ProcessSpec process = config.process();
  ChartConfig chart = config.chart();
  chart.limit = resolve_existing_limit(config, chart, process, store);

  const ArlEstimate est = estimate_arl(chart, process,
                                       ChangeSpec::at(1, config.delta),
                                       config.sim_options());

  std::ostringstream row;
  row << to_string(chart.scheme) << ',' << g6(phi1_of(process)) << ','
      << g6(config.delta) << ',' << opt6(chart.delta_star) << ','
      << g6(*chart.limit) << ',' << g6(est.mean) << ',' << g6(est.std_err)
      << ',' << est.reps << ',' << est.censored << ',' << config.seed << ','
      << g17(*chart.limit) << ',' << g17(est.mean) << ',' << g17(est.std_err)
      << ',' << config.config_hash() << ',' << kVersion;
  store.append_row("arl.csv", kArlHeader, row.str());

  out << "arl scheme=" << to_string(chart.scheme) << " phi="
      << g6(phi1_of(process)) << " delta=" << g6(config.delta)
      << " -> " << g6(est.mean) << " (se " << g6(est.std_err) << ", "
      << est.censored << " censored of " << est.reps << ")\n";
  if (!est.warning.empty()) out << "  warning: " << est.warning << "\n";
  return 0;
}

int cmd_delay(const RunConfig& config, ResultsStore& store, std::ostream& out) {
  config.validate();
  if (config.tau < 1) {
    throw ValidationError("delay requires --tau >= 1");
  }
  const ProcessSpec process = config.process();
  ChartConfig chart = config.chart();
  chart.limit = resolve_existing_limit(config, chart, process, store);

  const DelayEstimate est = estimate_delay(chart, process, config.delta,
                                           config.tau, config.sim_options());

  std::ostringstream row;
  row << to_string(chart.scheme) << ',' << g6(phi1_of(process)) << ','
      << g6(config.delta) << ',' << opt6(chart.delta_star) << ','
      << g6(*chart.limit) << ',' << g6(est.mean_delay) << ','
      << g6(est.std_err) << ',' << (est.accepted + est.rejected) << ','
      << est.censored << ',' << est.tau << ',' << config.seed << ','
      << g17(*chart.limit) << ',' << g17(est.mean_delay) << ','
      << g17(est.std_err) << ',' << config.config_hash() << ',' << kVersion;
  store.append_row("delay.csv", kDelayHeader, row.str());

  out << "delay scheme=" << to_string(chart.scheme) << " phi="
      << g6(phi1_of(process)) << " delta=" << g6(config.delta) << " tau="
      << est.tau << " -> " << g6(est.mean_delay) << " (se "
      << g6(est.std_err) << ", accepted " << est.accepted << ", rejected "
      << est.rejected << ")\n";
  if (!est.warning.empty()) out << "  warning: " << est.warning << "\n";
  return 0;
}

int cmd_table(const RunConfig& config, ResultsStore& store, std::ostream& out) {
  config.validate();
  const ExperimentGrid grid = config.experiment_grid();
  const CalibrationTarget target = config.calibration_target();
  const std::string hash = config.config_hash();

  if (config.table_mode == "delay") {
    for (double phi : grid.phis) {
      const auto rows =
          run_delay_table(grid, phi, config.tau_max, target, &store);
      for (const auto& r : rows) {
        std::ostringstream row;
        row << to_string(r.scheme) << ',' << g6(r.phi) << ',' << g6(r.delta)
            << ',' << opt6(r.delta_star) << ',' << g6(r.arl) << ','
            << g6(r.arl_std_err) << ',' << g6(r.worst_delay) << ','
            << g6(r.worst_std_err) << ',' << r.tau_worst << ','
            << g6(r.delay_at_tau_max) << ',' << g6(r.delay_std_err) << ','
            << r.tau_max << ',' << hash << ',' << config.seed << ','
            << kVersion;
        store.append_row("delay_table.csv", kDelayTableHeader, row.str());
        out << "delay-table " << to_string(r.scheme) << " phi=" << g6(r.phi)
            << " delta=" << g6(r.delta) << " arl=" << g6(r.arl) << " worst="
            << g6(r.worst_delay) << "@tau=" << r.tau_worst << " at_max="
            << g6(r.delay_at_tau_max) << "\n";
      }
    }
    return 0;
  }

  const auto cells = run_arl_table(grid, target, &store);
  for (const auto& c : cells) {
    std::ostringstream row;
    row << to_string(c.scheme) << ',' << g6(c.phi) << ',' << g6(c.delta) << ','
        << opt6(c.best_delta_star) << ',' << g6(c.arl) << ',' << g6(c.std_err)
        << ',' << (c.within_2pct ? "true" : "false") << ',' << g17(c.arl)
        << ',' << g17(c.std_err) << ',' << hash << ',' << config.seed << ','
        << kVersion;
    store.append_row("table.csv", kTableHeader, row.str());
    out << "table " << to_string(c.scheme) << " phi=" << g6(c.phi)
        << " delta=" << g6(c.delta) << " arl=" << g6(c.arl);
    if (c.best_delta_star) out << " (delta_star " << g6(*c.best_delta_star) << ")";
    if (c.within_2pct) out << " *";
    out << "\n";
  }
  out << cells.size() << " cells -> " << (store.dir() / "table.csv").string()
      << "\n";
  return 0;
}

int cmd_sensitivity(const RunConfig& config, ResultsStore& store,
                    std::ostream& out) {
  config.validate();
  const ProcessSpec process = config.process();
  const ExperimentGrid grid = config.experiment_grid();
  const CalibrationTarget target = config.calibration_target();
  const std::string hash = config.config_hash();

  const auto points = run_sensitivity(grid, phi1_of(process), config.delta,
                                      target, &store);
  for (const auto& p : points) {
    std::ostringstream row;
    row << to_string(p.scheme) << ',' << opt6(p.delta_star) << ','
        << g6(p.arl) << ',' << g6(p.std_err) << ',' << g6(phi1_of(process))
        << ',' << g6(config.delta) << ',' << g17(p.arl) << ','
        << g17(p.std_err) << ',' << hash << ',' << config.seed << ','
        << kVersion;
    store.append_row("sensitivity.csv", kSensitivityHeader, row.str());
    out << "sensitivity " << to_string(p.scheme);
    if (p.delta_star) {
      out << " delta_star=" << g6(*p.delta_star);
    } else {
      out << " (level)";
    }
    out << " arl=" << g6(p.arl) << "\n";
  }
  out << points.size() << " points -> "
      << (store.dir() / "sensitivity.csv").string() << "\n";
  return 0;
}

}  // namespace varcharts
