#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "varcharts/errors.hpp"
#include "varcharts/rng.hpp"

namespace varcharts {

enum class ProcessKind { kAr1, kAr2, kArma };

/// In-control Gaussian target process: a causal ARMA(p,q) driven by white
/// noise with variance sigma2 and process mean mu.  The mean is added only at
/// the observation boundary; all internal recursions run on the centered
/// series.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::kAr1;
  std::vector<double> phi;    // AR coefficients phi_1..phi_p
  std::vector<double> theta;  // MA coefficients theta_1..theta_q
  double sigma2 = 1.0;        // white-noise variance
  double mu = 0.0;            // process mean

  static ProcessSpec ar1(double phi1, double sigma2 = 1.0, double mu = 0.0);
  static ProcessSpec ar2(double phi1, double phi2, double sigma2 = 1.0,
                         double mu = 0.0);
  static ProcessSpec arma(std::vector<double> phi, std::vector<double> theta,
                          double sigma2 = 1.0, double mu = 0.0);

  int ar_order() const { return static_cast<int>(phi.size()); }
  int ma_order() const { return static_cast<int>(theta.size()); }

  /// Throws ValidationError / CausalityError when the spec is unusable.
  void validate() const;

  /// Canonical single-line description, used as a cache key component.
  std::string fingerprint() const;
};

/// True iff all roots of 1 - sum_i phi_i z^i lie strictly outside the unit
/// circle (the AR polynomial; MA coefficients play no role).
bool causality_check(const ProcessSpec& spec);

/// Variance gamma_0 of the stationary solution.  Closed forms for AR(1) and
/// AR(2); otherwise summed from the MA(infinity) expansion, truncated at a
/// relative tail mass of 1e-12.
double stationary_variance(const ProcessSpec& spec);

/// Autocovariance gamma_h of the stationary solution at lag h >= 0.
double autocovariance(const ProcessSpec& spec, int lag);

/// Sentinel for "no change ever" (tau = infinity).
inline constexpr std::int64_t kNoChange = std::numeric_limits<std::int64_t>::max();

/// Scale change of the observed process: X_t = Y_t before tau and
/// X_t = mu + delta * (Y_t - mu) from tau on.  delta = 1 or tau = infinity
/// encodes the in-control case.
struct ChangeSpec {
  std::int64_t tau = kNoChange;
  double delta = 1.0;

  static ChangeSpec none() { return {}; }
  static ChangeSpec at(std::int64_t tau, double delta) { return {tau, delta}; }

  bool in_control() const { return tau == kNoChange || delta == 1.0; }
  void validate() const;
};

/// One-step-ahead linear prediction for the centered process: at step t the
/// filter exposes the best linear predictor Xhat_t of X_t given X_1..X_{t-1}
/// together with its mean-square error v_{t-1}.  Closed-form fast paths for
/// AR(1)/AR(2); the general ARMA path runs the innovations recursion on the
/// standard transformed process, with coefficient memory bounded by
/// max(p, q+1).
class InnovationsFilter {
 public:
  explicit InnovationsFilter(const ProcessSpec& spec);

  struct Prediction {
    double x_hat;  // predictor of the next (centered) observation
    double msev;   // its mean-square error v_{t-1}
  };

  /// Predictor and mean-square error for observation index step()+1.
  Prediction predict() const;

  /// Absorb the next centered observation.
  void update(double x);

  /// Number of observations absorbed so far.
  std::int64_t step() const { return step_; }

  void reset();

 private:
  void generic_advance_row();

  ProcessSpec spec_;
  std::int64_t step_ = 0;

  // AR(1)/AR(2) fast-path state.
  double gamma0_ = 0.0;
  double v1_ = 0.0;      // AR(2) second-step mean-square error
  double last_ = 0.0;    // X_{t-1}
  double last2_ = 0.0;   // X_{t-2}

  // Generic ARMA state (innovations recursion on the transformed process).
  int m_ = 0;                                  // max(p, q)
  std::vector<double> kappa_gamma_;            // gamma_X(0..2m) / sigma2
  std::vector<std::vector<double>> theta_rows_;  // rows n-m..n-1 of theta_{n,j}
  std::vector<double> r_;                      // r_{n-m}..r_{n-1} (scaled MSEs)
  std::int64_t rows_done_ = 0;                 // innovations rows computed
  std::vector<double> recent_x_;               // last max(p,1) observations
  std::vector<double> recent_innov_;           // last max(q,m) innovations
  double next_x_hat_ = 0.0;
  double next_msev_ = 0.0;

  double kappa(std::int64_t i, std::int64_t j) const;
};

/// Streams observations X_1, X_2, ... of the observed process under the
/// change model.  The underlying target path is drawn from its exact
/// stationary law (the first value from the stationary marginal, later values
/// through the innovations representation), so no burn-in is needed.
/// Identical (seed, stream, spec, change) give bit-identical paths.
class PathGenerator {
 public:
  PathGenerator(const ProcessSpec& spec, const ChangeSpec& change,
                std::uint64_t seed, std::uint64_t stream = 0);

  double next();
  std::int64_t position() const { return t_; }

  /// Restart at t = 0 on the substream (seed, stream).
  void restart(std::uint64_t seed, std::uint64_t stream);

 private:
  ProcessSpec spec_;
  ChangeSpec change_;
  Rng rng_;
  InnovationsFilter filter_;
  std::int64_t t_ = 0;
};

}  // namespace varcharts
