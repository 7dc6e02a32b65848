#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "varcharts/process.hpp"

namespace varcharts {

/// The nine one-sided variance charts.  The first five monitor against a
/// fixed reference value delta_star; the generalized four maximize the change
/// magnitude out and take no reference value.
enum class ChartScheme {
  kCusumIid,  // squared-observation CUSUM with the independence-form statistic
  kLr,        // likelihood-ratio CUSUM for AR(1)/AR(2)
  kSprt,      // CUSUM of squared normalized one-step prediction residuals
  kSrIid,     // Shiryaev-Roberts, independence-form statistic
  kSr,        // Shiryaev-Roberts for Gaussian processes
  kGlr,       // generalized likelihood ratio
  kGsprt,     // generalized sequential probability ratio
  kGsrIid,    // generalized Shiryaev-Roberts, independence-form statistic
  kGsr,       // generalized Shiryaev-Roberts for Gaussian processes
};

inline constexpr ChartScheme kAllSchemes[] = {
    ChartScheme::kCusumIid, ChartScheme::kLr,     ChartScheme::kSprt,
    ChartScheme::kSrIid,    ChartScheme::kSr,     ChartScheme::kGlr,
    ChartScheme::kGsprt,    ChartScheme::kGsrIid, ChartScheme::kGsr};

const char* to_string(ChartScheme scheme);
ChartScheme scheme_from_string(std::string_view name);

/// True for the five schemes that require a reference value delta_star.
bool scheme_uses_reference(ChartScheme scheme);

/// True for the Shiryaev-Roberts schemes, whose statistic and control limit
/// live on the log scale.
bool scheme_uses_log_limit(ChartScheme scheme);

struct ChartConfig {
  ChartScheme scheme = ChartScheme::kCusumIid;
  std::optional<double> delta_star;  // required iff scheme_uses_reference
  std::optional<double> limit;       // control limit c; log c for SR schemes
  std::int64_t glr_window = 0;       // candidate window for kGlr; 0 = unbounded

  void validate() const;
};

/// Reference constant K(delta) = log(delta^2) / (1 - delta^-2) for delta > 1.
/// Continuous and increasing, with limit 1 as delta -> 1+.
double k_ref(double delta);

/// n_weight * (x - 1 - log x) / 2 for x >= 1, zero for 0 <= x < 1.
double h_clamped(double n_weight, double x);

/// Clamped maximizer of the out-of-control log-likelihood over scales >= 1:
/// max{1, [d + sqrt(d^2 + 4 m s_ddot)] / (2m)} with d = s_dot - s_ddot.
double glr_delta_star(double s_dot, double s_ddot, std::int64_t m);

// Statistic form for the generalized SR chart.  The default scores
// 2 sup_{delta >= 1} of the summed log-likelihood ratios, whose quadratic
// term enters with weight 1; the compile-time alternative halves it.
#ifdef VARCHARTS_GSR_HALF_QUADRATIC
inline constexpr bool kGsrHalfQuadratic = true;
#else
inline constexpr bool kGsrHalfQuadratic = false;
#endif

/// A chart consumes one observation at a time and yields the current decision
/// statistic.  The alarm rule (statistic > limit, strict) belongs to the
/// run-length layer.  Instances are single-owner; reset() restarts at n = 0.
class Chart {
 public:
  virtual ~Chart() = default;
  virtual double update(double x) = 0;
  virtual void reset() = 0;
  virtual std::int64_t step() const = 0;
};

/// Builds the chart for `config` monitoring the in-control process `spec`.
/// Throws UnsupportedSchemeError when the scheme has no update rule for the
/// process kind (kLr: AR(1)/AR(2) only; kGlr, kGsr: AR(1) only).
std::unique_ptr<Chart> make_chart(const ChartConfig& config,
                                  const ProcessSpec& spec);

}  // namespace varcharts
