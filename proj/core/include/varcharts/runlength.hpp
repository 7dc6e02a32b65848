#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "varcharts/charts.hpp"
#include "varcharts/process.hpp"

namespace varcharts {

struct RunLengthSample {
  std::int64_t n = 0;      // first index with statistic > limit; cap if censored
  bool censored = false;
};

struct ArlEstimate {
  double mean = 0.0;       // censored runs enter at the cap (lower bound then)
  double std_err = 0.0;
  std::int64_t reps = 0;
  std::int64_t censored = 0;
  std::string warning;     // set when the censored fraction exceeds 1%
};

struct DelayEstimate {
  std::int64_t tau = 1;
  double mean_delay = 0.0;  // mean of N - tau + 1 over runs with N >= tau
  double std_err = 0.0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;  // runs alarming before tau, dropped
  std::int64_t censored = 0;
  std::string warning;
};

struct SimOptions {
  std::int64_t reps = 100000;
  std::uint64_t seed = 1;
  std::int64_t cap = 50000;
  int workers = 0;  // 0 = hardware concurrency
};

/// Replication `replication` of the chart's run length: the first n <= cap
/// with statistic_n > limit (strict), else CENSORED at cap.
RunLengthSample first_passage(const ChartConfig& config,
                              const ProcessSpec& process,
                              const ChangeSpec& change, std::uint64_t seed,
                              std::uint64_t replication, std::int64_t cap);

/// First passage on an injected path; returns 0 when no alarm occurs.
std::int64_t first_passage_on_path(Chart& chart, std::span<const double> path,
                                   double limit);

/// Mean run length over independent replication substreams of (seed, r).
/// Deterministic for fixed options, independent of worker count.
ArlEstimate estimate_arl(const ChartConfig& config, const ProcessSpec& process,
                         const ChangeSpec& change, const SimOptions& options);

/// Conditional mean delay E(N - tau + 1 | N >= tau) under a change of size
/// delta at tau, estimated by rejection.  reps counts attempted runs.
DelayEstimate estimate_delay(const ChartConfig& config,
                             const ProcessSpec& process, double delta,
                             std::int64_t tau, const SimOptions& options);

/// estimate_delay at each tau in 1..tau_max; returns the maximizing tau and
/// its estimate (smallest tau on ties).
std::pair<std::int64_t, DelayEstimate> worst_delay(const ChartConfig& config,
                                                   const ProcessSpec& process,
                                                   double delta,
                                                   std::int64_t tau_max,
                                                   const SimOptions& options);

namespace detail {

/// Runs fn(r) for r in [0, reps) on `workers` threads.  Replications are
/// grouped into fixed-size blocks claimed atomically; per-block integer
/// accumulators are folded in block order, so results do not depend on the
/// number of workers or the scheduling.
struct RunAccumulator {
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  std::int64_t count = 0;
  std::int64_t censored = 0;
  std::int64_t rejected = 0;

  void fold(const RunAccumulator& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
    censored += other.censored;
    rejected += other.rejected;
  }
};

int resolve_workers(int workers);

}  // namespace detail

}  // namespace varcharts
