#include "varcharts/runlength.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace varcharts {

namespace {

constexpr std::int64_t kBlock = 256;

double require_limit(const ChartConfig& config) {
  if (!config.limit) {
    throw ValidationError("chart.limit is not set; run calibrate first or pass --limit");
  }
  return *config.limit;
}

// Run one replication to the first alarm; 0 means censored at cap.
std::int64_t run_once(Chart& chart, PathGenerator& gen, double limit,
                      std::int64_t cap) {
  for (std::int64_t n = 1; n <= cap; ++n) {
    if (chart.update(gen.next()) > limit) return n;
  }
  return 0;
}

// Deterministic block-parallel driver.  Each worker owns one chart and one
// generator, reset per replication; per-block accumulators are folded in
// block order afterwards.
detail::RunAccumulator simulate_blocks(
    const ChartConfig& config, const ProcessSpec& process,
    const ChangeSpec& change, const SimOptions& options,
    const std::function<void(std::int64_t run, detail::RunAccumulator&)>& record) {
  const double limit = require_limit(config);
  const std::int64_t reps = options.reps;
  const std::int64_t nblocks = (reps + kBlock - 1) / kBlock;
  std::vector<detail::RunAccumulator> partials(
      static_cast<std::size_t>(nblocks));
  std::atomic<std::int64_t> next_block{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      auto chart = make_chart(config, process);
      PathGenerator gen(process, change, options.seed, 0);
      for (;;) {
        const std::int64_t b = next_block.fetch_add(1);
        if (b >= nblocks || failed.load(std::memory_order_relaxed)) break;
        detail::RunAccumulator acc;
        const std::int64_t lo = b * kBlock;
        const std::int64_t hi = std::min(reps, lo + kBlock);
        for (std::int64_t r = lo; r < hi; ++r) {
          gen.restart(options.seed, static_cast<std::uint64_t>(r));
          chart->reset();
          record(run_once(*chart, gen, limit, options.cap), acc);
        }
        partials[static_cast<std::size_t>(b)] = acc;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };

  const int workers = detail::resolve_workers(options.workers);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  detail::RunAccumulator total;
  for (const auto& p : partials) total.fold(p);
  return total;
}

double std_err_from_sums(std::int64_t sum, std::int64_t sum_sq,
                         std::int64_t count) {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double mean = static_cast<double>(sum) / n;
  double var = (static_cast<double>(sum_sq) - n * mean * mean) / (n - 1.0);
  var = std::max(var, 0.0);
  return std::sqrt(var / n);
}

}  // namespace

namespace detail {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace detail

RunLengthSample first_passage(const ChartConfig& config,
                              const ProcessSpec& process,
                              const ChangeSpec& change, std::uint64_t seed,
                              std::uint64_t replication, std::int64_t cap) {
  const double limit = require_limit(config);
  if (cap < 1) throw ValidationError("sim.cap must be >= 1");
  auto chart = make_chart(config, process);
  PathGenerator gen(process, change, seed, replication);
  const std::int64_t n = run_once(*chart, gen, limit, cap);
  if (n == 0) return {cap, true};
  return {n, false};
}

std::int64_t first_passage_on_path(Chart& chart, std::span<const double> path,
                                   double limit) {
  std::int64_t n = 0;
  for (double x : path) {
    ++n;
    if (chart.update(x) > limit) return n;
  }
  return 0;
}

ArlEstimate estimate_arl(const ChartConfig& config, const ProcessSpec& process,
                         const ChangeSpec& change, const SimOptions& options) {
  if (options.reps < 1) throw ValidationError("sim.reps must be >= 1");
  if (options.cap < 1) throw ValidationError("sim.cap must be >= 1");
  change.validate();

  const auto total = simulate_blocks(
      config, process, change, options,
      [&](std::int64_t n, detail::RunAccumulator& acc) {
        if (n == 0) {
          ++acc.censored;
          n = options.cap;
        }
        acc.sum += n;
        acc.sum_sq += n * n;
        ++acc.count;
      });

  ArlEstimate est;
  est.reps = total.count;
  est.censored = total.censored;
  est.mean = static_cast<double>(total.sum) / static_cast<double>(total.count);
  est.std_err = std_err_from_sums(total.sum, total.sum_sq, total.count);
  if (total.censored * 100 > total.count) {
    est.warning = "censored fraction exceeds 1%; the mean is a lower bound";
  }
  return est;
}

DelayEstimate estimate_delay(const ChartConfig& config,
                             const ProcessSpec& process, double delta,
                             std::int64_t tau, const SimOptions& options) {
  if (tau < 1) throw ValidationError("change.tau must be >= 1");
  if (options.cap < tau) {
    throw ValidationError("sim.cap must be >= change.tau");
  }
  const ChangeSpec change = ChangeSpec::at(tau, delta);

  const auto total = simulate_blocks(
      config, process, change, options,
      [&](std::int64_t n, detail::RunAccumulator& acc) {
        if (n == 0) {  // censored; the run survived past cap >= tau
          ++acc.censored;
          n = options.cap;
        } else if (n < tau) {
          ++acc.rejected;
          return;
        }
        const std::int64_t delay = n - tau + 1;
        acc.sum += delay;
        acc.sum_sq += delay * delay;
        ++acc.count;
      });

  if (total.count == 0) {
    throw EstimationError("no run survived to the change point; cannot estimate the delay");
  }
  DelayEstimate est;
  est.tau = tau;
  est.accepted = total.count;
  est.rejected = total.rejected;
  est.censored = total.censored;
  est.mean_delay =
      static_cast<double>(total.sum) / static_cast<double>(total.count);
  est.std_err = std_err_from_sums(total.sum, total.sum_sq, total.count);
  if (total.censored * 100 > total.count) {
    est.warning = "censored fraction exceeds 1%; the mean delay is a lower bound";
  }
  return est;
}

std::pair<std::int64_t, DelayEstimate> worst_delay(const ChartConfig& config,
                                                   const ProcessSpec& process,
                                                   double delta,
                                                   std::int64_t tau_max,
                                                   const SimOptions& options) {
  if (tau_max < 1) throw ValidationError("tau_max must be >= 1");
  std::int64_t best_tau = 1;
  DelayEstimate best;
  for (std::int64_t tau = 1; tau <= tau_max; ++tau) {
    DelayEstimate est = estimate_delay(config, process, delta, tau, options);
    if (tau == 1 || est.mean_delay > best.mean_delay) {
      best = est;
      best_tau = tau;
    }
  }
  return {best_tau, best};
}

}  // namespace varcharts
