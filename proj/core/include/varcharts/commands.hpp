#pragma once

#include <ostream>

#include "varcharts/results_store.hpp"
#include "varcharts/run_config.hpp"

namespace varcharts {

// Subcommand bodies.  Each validates the whole configuration up front,
// simulates, prints a human-readable summary to `out`, and appends CSV rows
// to the results store.  Errors are reported by throwing; the CLI maps
// exception types to exit codes (2 validation, 3 calibration, 4 estimation).

int cmd_calibrate(const RunConfig& config, ResultsStore& store,
                  std::ostream& out);
int cmd_arl(const RunConfig& config, ResultsStore& store, std::ostream& out);
int cmd_delay(const RunConfig& config, ResultsStore& store, std::ostream& out);
int cmd_table(const RunConfig& config, ResultsStore& store, std::ostream& out);
int cmd_sensitivity(const RunConfig& config, ResultsStore& store,
                    std::ostream& out);

}  // namespace varcharts
