#include "varcharts/calibrate.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace varcharts {

void CalibrationTarget::validate() const {
  if (!(target_arl > 1.0) || !std::isfinite(target_arl)) {
    throw ValidationError("calibrate.target_arl must be a finite number > 1");
  }
  if (!(rel_tol > 0.0) || !(rel_tol < 0.1)) {
    throw ValidationError("calibrate.rel_tol must lie in (0, 0.1)");
  }
  if (reps < 1) throw ValidationError("sim.reps must be >= 1");
  if (cap < 0) throw ValidationError("sim.cap must be >= 0 (0 = auto)");
}

std::int64_t CalibrationTarget::effective_cap() const {
  if (cap > 0) return cap;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(100.0 * target_arl)));
}

double CalibrationTarget::tolerance(double std_err) const {
  return std::max(rel_tol * target_arl, 3.0 * std_err);
}

namespace {

struct BoundedEval {
  ArlEstimate est;      // valid when completed
  bool completed = false;
  double bound = 0.0;   // certified lower bound on the mean when aborted
};

// In-control ARL evaluation that can abort once the mean is certifiably
// above `abort_above` (unfinished replications counted at their minimum 1).
// Blocks are processed in waves in index order, so the abort decision and the
// completed estimate are both independent of the worker count.
BoundedEval arl_eval_bounded(const ChartConfig& config,
                             const ProcessSpec& process, std::int64_t reps,
                             std::uint64_t seed, std::int64_t cap, int workers,
                             double abort_above) {
  constexpr std::int64_t kBlock = 256;
  const double limit = *config.limit;
  const std::int64_t nblocks = (reps + kBlock - 1) / kBlock;
  workers = detail::resolve_workers(workers);

  std::vector<std::unique_ptr<Chart>> charts;
  std::vector<PathGenerator> gens;
  for (int i = 0; i < workers; ++i) {
    charts.push_back(make_chart(config, process));
    gens.emplace_back(process, ChangeSpec::none(), seed, 0);
  }

  detail::RunAccumulator total;
  std::vector<detail::RunAccumulator> wave(static_cast<std::size_t>(workers));

  for (std::int64_t wave_start = 0; wave_start < nblocks;
       wave_start += workers) {
    auto run_block = [&](int slot) {
      detail::RunAccumulator acc;
      const std::int64_t b = wave_start + slot;
      if (b < nblocks) {
        Chart& chart = *charts[static_cast<std::size_t>(slot)];
        PathGenerator& gen = gens[static_cast<std::size_t>(slot)];
        const std::int64_t lo = b * kBlock;
        const std::int64_t hi = std::min(reps, lo + kBlock);
        for (std::int64_t r = lo; r < hi; ++r) {
          gen.restart(seed, static_cast<std::uint64_t>(r));
          chart.reset();
          std::int64_t n = 0;
          for (std::int64_t t = 1; t <= cap; ++t) {
            if (chart.update(gen.next()) > limit) {
              n = t;
              break;
            }
          }
          if (n == 0) {
            ++acc.censored;
            n = cap;
          }
          acc.sum += n;
          acc.sum_sq += n * n;
          ++acc.count;
        }
      }
      wave[static_cast<std::size_t>(slot)] = acc;
    };

    if (workers == 1) {
      run_block(0);
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back(run_block, i);
      for (auto& t : pool) t.join();
    }
    for (const auto& acc : wave) total.fold(acc);

    const std::int64_t remaining = reps - total.count;
    const double bound =
        (static_cast<double>(total.sum) + static_cast<double>(remaining)) /
        static_cast<double>(reps);
    if (remaining > 0 && bound > abort_above) {
      return {.est = {}, .completed = false, .bound = bound};
    }
  }

  BoundedEval out;
  out.completed = true;
  out.est.reps = total.count;
  out.est.censored = total.censored;
  out.est.mean =
      static_cast<double>(total.sum) / static_cast<double>(total.count);
  if (total.count > 1) {
    const double n = static_cast<double>(total.count);
    double var = (static_cast<double>(total.sum_sq) - n * out.est.mean * out.est.mean) /
                 (n - 1.0);
    out.est.std_err = std::sqrt(std::max(var, 0.0) / n);
  }
  out.bound = out.est.mean;
  return out;
}

double step_up(const ChartConfig& config, double limit) {
  // Doubles the threshold; SR limits are stored as logs.
  return scheme_uses_log_limit(config.scheme) ? limit + std::log(2.0)
                                              : limit * 2.0;
}

double step_down(const ChartConfig& config, double limit) {
  return scheme_uses_log_limit(config.scheme) ? limit - std::log(2.0)
                                              : limit * 0.5;
}

double initial_guess(const ChartConfig& config, double target_arl) {
  const double l = std::log(target_arl);
  return scheme_uses_log_limit(config.scheme) ? l : 2.0 * l;
}

struct BracketState {
  double lo = 0.0, hi = 0.0;
  int expansions = 0;
  std::vector<BracketPoint> history;
};

BracketState bracket_impl(const ChartConfig& config, const ProcessSpec& process,
                          const CalibrationTarget& target) {
  target.validate();
  const double xi = target.target_arl;
  const std::int64_t reps_b = std::min<std::int64_t>(target.reps, 2048);
  const std::int64_t cap_b = target.effective_cap();

  ChartConfig probe = config;
  BracketState state;
  double limit = initial_guess(config, xi);

  auto classify_hi = [&](double c) {
    probe.limit = c;
    const BoundedEval ev = arl_eval_bounded(probe, process, reps_b, target.seed,
                                            cap_b, target.workers, xi);
    state.history.push_back({c, ev.completed ? ev.est.mean : ev.bound});
    return !ev.completed || ev.est.mean > xi;
  };

  const bool start_high = classify_hi(limit);
  ++state.expansions;
  double other = limit;
  for (int i = 0; i < 60; ++i) {
    other = start_high ? step_down(config, other) : step_up(config, other);
    ++state.expansions;
    if (classify_hi(other) != start_high) {
      state.lo = start_high ? other : limit;
      state.hi = start_high ? limit : other;
      return state;
    }
    // Keep the tightest end of the scanned range as the opposite endpoint.
    if (start_high) {
      limit = other;  // still high; shrink from here next time
    } else {
      limit = other;
    }
  }
  throw CalibrationError("failed to bracket the control limit in 60 expansions");
}

}  // namespace

std::pair<double, double> bracket_limit(const ChartConfig& config,
                                        const ProcessSpec& process,
                                        const CalibrationTarget& target) {
  const BracketState state = bracket_impl(config, process, target);
  return {state.lo, state.hi};
}

CalibrationResult calibrate_limit(const ChartConfig& config,
                                  const ProcessSpec& process,
                                  const CalibrationTarget& target) {
  BracketState state = bracket_impl(config, process, target);
  const double xi = target.target_arl;
  const std::int64_t cap = target.effective_cap();

  ChartConfig probe = config;
  double lo = state.lo;
  double hi = state.hi;
  bool aborts_enabled = true;

  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    probe.limit = mid;
    const double abort_above =
        aborts_enabled ? xi * 1.05 : std::numeric_limits<double>::infinity();
    const BoundedEval ev = arl_eval_bounded(probe, process, target.reps,
                                            target.seed, cap, target.workers,
                                            abort_above);
    state.history.push_back({mid, ev.completed ? ev.est.mean : ev.bound});

    double decision_mean;
    if (!ev.completed) {
      decision_mean = ev.bound;  // certified above 1.05 * target
    } else {
      decision_mean = ev.est.mean;
      if (std::abs(ev.est.mean - xi) <= target.tolerance(ev.est.std_err)) {
        CalibrationResult result;
        result.limit = mid;
        result.achieved = ev.est;
        result.iterations = state.expansions + iter + 1;
        result.history = std::move(state.history);
        return result;
      }
    }

    if (decision_mean < xi) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-9 * std::max(1.0, std::abs(hi))) {
      // Interval exhausted without convergence: widen and re-run honestly.
      lo = step_down(config, lo);
      hi = step_up(config, hi);
      aborts_enabled = false;
    }
  }
  std::string detail = "calibration did not converge in 60 bisections; history:";
  for (const auto& p : state.history) {
    detail += " (" + std::to_string(p.limit) + ", " + std::to_string(p.arl) + ")";
  }
  throw CalibrationError(detail);
}

CalibrationResult resolve_limit(const ChartConfig& config,
                                const ProcessSpec& process,
                                const CalibrationTarget& target,
                                LimitCache* cache) {
  if (cache != nullptr) {
    if (auto hit = cache->lookup(config, process, target)) {
      return *hit;
    }
  }
  CalibrationResult result = calibrate_limit(config, process, target);
  if (cache != nullptr) {
    cache->store(config, process, target, result);
  }
  return result;
}

}  // namespace varcharts
