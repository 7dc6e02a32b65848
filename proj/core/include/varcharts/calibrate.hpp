#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "varcharts/charts.hpp"
#include "varcharts/process.hpp"
#include "varcharts/runlength.hpp"

namespace varcharts {

struct CalibrationTarget {
  double target_arl = 500.0;  // required in-control average run length
  double rel_tol = 0.005;
  std::int64_t reps = 100000;
  std::uint64_t seed = 1;
  std::int64_t cap = 0;  // 0 = 100 * target_arl
  int workers = 0;

  void validate() const;
  std::int64_t effective_cap() const;
  /// |mean - target| must fall below this for a calibration to converge.
  double tolerance(double std_err) const;
};

struct BracketPoint {
  double limit;
  double arl;  // estimate, or a certified lower bound from an aborted pass
};

struct CalibrationResult {
  double limit = 0.0;            // log-scale for SR schemes
  ArlEstimate achieved;          // in-control ARL at `limit`, full settings
  int iterations = 0;            // bracket expansions + bisection steps
  std::vector<BracketPoint> history;
};

/// Limits (c_lo, c_hi) whose estimated in-control ARLs straddle the target,
/// found by doubling/halving the limit (for SR schemes the limit already
/// lives on the log scale, so this doubles/halves the threshold itself).
/// Bracket evaluations run on a reduced replication count.
std::pair<double, double> bracket_limit(const ChartConfig& config,
                                        const ProcessSpec& process,
                                        const CalibrationTarget& target);

/// Bisection on the control limit with common random numbers: every
/// evaluation reuses the substream family (seed, r), making the estimated
/// in-control ARL a non-decreasing step function of the limit.  Converges
/// when |ARL - target| <= max(rel_tol * target, 3 * std_err).
CalibrationResult calibrate_limit(const ChartConfig& config,
                                  const ProcessSpec& process,
                                  const CalibrationTarget& target);

/// Persistent calibration lookup keyed by
/// (scheme, delta_star, process fingerprint, target, reps, seed, cap).
class LimitCache {
 public:
  virtual ~LimitCache() = default;
  virtual std::optional<CalibrationResult> lookup(
      const ChartConfig& config, const ProcessSpec& process,
      const CalibrationTarget& target) const = 0;
  virtual void store(const ChartConfig& config, const ProcessSpec& process,
                     const CalibrationTarget& target,
                     const CalibrationResult& result) = 0;
};

/// Cache hit, or calibrate and store.  `cache` may be null.
CalibrationResult resolve_limit(const ChartConfig& config,
                                const ProcessSpec& process,
                                const CalibrationTarget& target,
                                LimitCache* cache);

}  // namespace varcharts
