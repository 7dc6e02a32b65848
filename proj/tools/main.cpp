// Command-line front end: calibrate | arl | delay | table | sensitivity.
// Flags may also come from a flat key=value config file (--config); explicit
// flags win over file values.  Results land as CSV in --results-dir, which
// also holds the persistent control-limit cache.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "varcharts/commands.hpp"
#include "varcharts/version.hpp"

namespace {

using varcharts::RunConfig;

void add_common_options(CLI::App* cmd, RunConfig& config,
                        std::string& results_dir) {
  cmd->set_config("--config", "", "Flat key=value config file; flags override");

  auto* proc = cmd->add_option_group("process");
  proc->add_option("--kind", config.kind,
                   "Process kind: ar1 | ar2 | arma | auto");
  proc->add_option("--phi", config.phi, "AR coefficients phi_1..phi_p")
      ->delimiter(',');
  proc->add_option("--theta", config.theta, "MA coefficients theta_1..theta_q")
      ->delimiter(',');
  proc->add_option("--sigma2", config.sigma2, "White-noise variance (> 0)");
  proc->add_option("--mu", config.mu, "Process mean");

  auto* sim = cmd->add_option_group("simulation");
  sim->add_option("--reps", config.reps,
                  "Replications (0 = auto: 100000; 10000 for glr)");
  sim->add_option("--cap", config.cap,
                  "Run-length cap (0 = auto: 100 * target-arl)");
  sim->add_option("--seed", config.seed, "Master seed");
  sim->add_option("--workers", config.workers,
                  "Worker threads (0 = all hardware threads)");

  auto* cal = cmd->add_option_group("calibration");
  cal->add_option("--target-arl", config.target_arl,
                  "In-control average run length to calibrate to");
  cal->add_option("--rel-tol", config.rel_tol,
                  "Relative calibration tolerance");

  cmd->add_option("--results-dir", results_dir,
                  "Results/cache directory")
      ->envname("VARCHARTS_RESULTS_DIR");
}

void add_chart_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--scheme", config.scheme,
                  "Chart scheme: cusum_iid | lr | sprt | sr_iid | sr | glr | "
                  "gsprt | gsr_iid | gsr")
      ->required();
  cmd->add_option("--delta-star", [&config](const CLI::results_t& values) {
        config.delta_star = std::stod(values.at(0));
        return true;
      },
      "Reference value (required for cusum_iid/lr/sprt/sr_iid/sr)");
  cmd->add_option("--glr-window", config.glr_window,
                  "Candidate window for glr (0 = unbounded)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential variance charts: Monte-Carlo run lengths, "
               "control-limit calibration, and comparison experiments"};
  app.set_version_flag("--version", varcharts::kVersion);
  app.require_subcommand(1);

  RunConfig config;
  std::string results_dir = "results";

  auto* calibrate = app.add_subcommand(
      "calibrate", "Find the control limit for a target in-control ARL");
  add_common_options(calibrate, config, results_dir);
  add_chart_options(calibrate, config);

  auto* arl = app.add_subcommand(
      "arl", "Estimate the average run length under a scale change at tau=1");
  add_common_options(arl, config, results_dir);
  add_chart_options(arl, config);
  arl->add_option("--delta", config.delta, "Scale change size (>= 1)");
  arl->add_option("--limit", [&config](const CLI::results_t& values) {
        config.limit = std::stod(values.at(0));
        return true;
      },
      "Control limit; skips the cache lookup");

  auto* delay = app.add_subcommand(
      "delay", "Estimate the conditional average delay for a change at tau");
  add_common_options(delay, config, results_dir);
  add_chart_options(delay, config);
  delay->add_option("--delta", config.delta, "Scale change size (>= 1)");
  delay->add_option("--tau", config.tau, "Change position (>= 1)")->required();
  delay->add_option("--limit", [&config](const CLI::results_t& values) {
        config.limit = std::stod(values.at(0));
        return true;
      },
      "Control limit; skips the cache lookup");

  auto* table = app.add_subcommand(
      "table", "Run the comparison grid (ARL table, or delay table with "
               "--mode delay)");
  add_common_options(table, config, results_dir);
  table->add_option("--phis", config.phis, "AR(1) coefficient grid")
      ->delimiter(',');
  table->add_option("--deltas", config.deltas, "Change size grid")
      ->delimiter(',');
  table->add_option("--delta-stars", config.delta_stars,
                    "Reference value grid")
      ->delimiter(',');
  table->add_option("--schemes", config.schemes,
                    "Schemes to include ('all' for all nine)")
      ->delimiter(',');
  table->add_option("--mode", config.table_mode, "arl | delay");
  table->add_option("--tau-max", config.tau_max,
                    "Delay table: largest change position");

  auto* sensitivity = app.add_subcommand(
      "sensitivity", "ARL as a function of the reference value at one "
                     "(phi, delta)");
  add_common_options(sensitivity, config, results_dir);
  sensitivity->add_option("--delta", config.delta, "Scale change size");
  sensitivity->add_option("--delta-stars", config.delta_stars,
                          "Reference value grid")
      ->delimiter(',');
  sensitivity->add_option("--schemes", config.schemes,
                          "Schemes to include ('all' for all nine)")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    varcharts::ResultsStore store{results_dir};
    if (calibrate->parsed()) return varcharts::cmd_calibrate(config, store, std::cout);
    if (arl->parsed()) return varcharts::cmd_arl(config, store, std::cout);
    if (delay->parsed()) return varcharts::cmd_delay(config, store, std::cout);
    if (table->parsed()) return varcharts::cmd_table(config, store, std::cout);
    if (sensitivity->parsed()) return varcharts::cmd_sensitivity(config, store, std::cout);
  } catch (const varcharts::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const varcharts::DomainError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const varcharts::CausalityError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const varcharts::UnsupportedSchemeError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const varcharts::CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n";
    return 3;
  } catch (const varcharts::EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return 4;
  } catch (const varcharts::NumericalError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
