#include "varcharts/charts.hpp"

#include <cmath>
#include <vector>

#include "varcharts/numerics.hpp"

namespace varcharts {

const char* to_string(ChartScheme scheme) {
  switch (scheme) {
    case ChartScheme::kCusumIid: return "cusum_iid";
    case ChartScheme::kLr: return "lr";
    case ChartScheme::kSprt: return "sprt";
    case ChartScheme::kSrIid: return "sr_iid";
    case ChartScheme::kSr: return "sr";
    case ChartScheme::kGlr: return "glr";
    case ChartScheme::kGsprt: return "gsprt";
    case ChartScheme::kGsrIid: return "gsr_iid";
    case ChartScheme::kGsr: return "gsr";
  }
  return "?";
}

ChartScheme scheme_from_string(std::string_view name) {
  for (ChartScheme s : kAllSchemes) {
    if (name == to_string(s)) return s;
  }
  throw ValidationError("unknown chart scheme: " + std::string(name));
}

bool scheme_uses_reference(ChartScheme scheme) {
  switch (scheme) {
    case ChartScheme::kCusumIid:
    case ChartScheme::kLr:
    case ChartScheme::kSprt:
    case ChartScheme::kSrIid:
    case ChartScheme::kSr:
      return true;
    default:
      return false;
  }
}

bool scheme_uses_log_limit(ChartScheme scheme) {
  return scheme == ChartScheme::kSrIid || scheme == ChartScheme::kSr;
}

void ChartConfig::validate() const {
  if (scheme_uses_reference(scheme)) {
    if (!delta_star) {
      throw ValidationError(std::string("chart.delta_star is required for scheme ") +
                            to_string(scheme));
    }
    if (!(*delta_star > 1.0) || !std::isfinite(*delta_star)) {
      throw ValidationError("chart.delta_star must be a finite number > 1");
    }
  } else if (delta_star) {
    throw ValidationError(std::string("chart.delta_star is not accepted by scheme ") +
                          to_string(scheme));
  }
  if (limit) {
    if (!std::isfinite(*limit)) {
      throw ValidationError("chart.limit must be finite");
    }
    if (!scheme_uses_log_limit(scheme) && !(*limit > 0.0)) {
      throw ValidationError("chart.limit must be > 0");
    }
  }
  if (glr_window < 0) {
    throw ValidationError("chart.glr_window must be >= 0 (0 = unbounded)");
  }
}

double k_ref(double delta) {
  if (!(delta > 1.0) || !std::isfinite(delta)) {
    throw DomainError("reference constant requires delta > 1");
  }
  const double d2 = delta * delta;
  return std::log(d2) / (1.0 - 1.0 / d2);
}

double h_clamped(double n_weight, double x) {
  if (x < 0.0 || !std::isfinite(x)) {
    throw DomainError("h_clamped requires x >= 0");
  }
  if (x <= 1.0) return 0.0;
  return n_weight * (x - 1.0 - std::log(x)) / 2.0;
}

double glr_delta_star(double s_dot, double s_ddot, std::int64_t m) {
  const double d = s_dot - s_ddot;
  const double md = static_cast<double>(m);
  const double root = std::sqrt(d * d + 4.0 * md * s_ddot);
  return std::max(1.0, (d + root) / (2.0 * md));
}

namespace {

// All charts run on the centered series; `mu` is subtracted once per update.

class CusumIidChart final : public Chart {
 public:
  CusumIidChart(const ProcessSpec& spec, double delta_star)
      : mu_(spec.mu), gamma0_(stationary_variance(spec)), k_(k_ref(delta_star)) {}

  double update(double x) override {
    const double xc = x - mu_;
    ++n_;
    s_plus_ = std::max(0.0, s_plus_ + xc * xc / gamma0_ - k_);
    return s_plus_;
  }

  void reset() override {
    n_ = 0;
    s_plus_ = 0.0;
  }

  std::int64_t step() const override { return n_; }

 private:
  double mu_;
  double gamma0_;
  double k_;
  double s_plus_ = 0.0;
  std::int64_t n_ = 0;
};

class LrAr1Chart final : public Chart {
 public:
  LrAr1Chart(const ProcessSpec& spec, double delta_star)
      : mu_(spec.mu),
        k_(k_ref(delta_star)),
        two_over_1p_(2.0 / (delta_star + 1.0)),
        filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    filter_.update(xc);
    const double resid = xc - pred.x_hat;
    const double candidate =
        (-pred.x_hat * pred.x_hat + two_over_1p_ * xc * pred.x_hat) / pred.msev;
    a_plus_ = resid * resid / pred.msev - k_ + std::max(candidate, a_plus_);
    return std::max(0.0, a_plus_);
  }

  void reset() override {
    a_plus_ = 0.0;
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  double mu_;
  double k_;
  double two_over_1p_;  // (2/delta) / (1 + 1/delta)
  InnovationsFilter filter_;
  double a_plus_ = 0.0;
};

// AR(2) variant.  The newest change-point candidate entering the maximum at
// step n is n-1: its cross term needs the observation after the candidate
// point, so each candidate is scored one step after it appears.
class LrAr2Chart final : public Chart {
 public:
  LrAr2Chart(const ProcessSpec& spec, double delta_star)
      : mu_(spec.mu),
        phi2_(spec.phi[1]),
        k_(k_ref(delta_star)),
        coef_cross_(2.0 * delta_star / (1.0 + delta_star)),
        coef_back_(2.0 / (delta_star + 1.0)),
        coef_back2_((delta_star - 1.0) / (delta_star + 1.0)),
        filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    filter_.update(xc);
    const double resid = xc - pred.x_hat;
    const std::int64_t n = filter_.step();
    if (n == 1) {
      b_plus_ = xc * xc / pred.msev - k_;
    } else {
      double candidate =
          (prev_x_ * prev_x_ - coef_cross_ * prev_x_ * prev_xhat_) / prev_v_;
      if (n - 1 >= 2) {
        candidate += (coef_back_ * phi2_ * prev2_x_ * resid -
                      coef_back2_ * phi2_ * phi2_ * prev2_x_ * prev2_x_) /
                     pred.msev;
      }
      candidate -= k_;
      b_plus_ = resid * resid / pred.msev - k_ + std::max(candidate, b_plus_);
    }
    prev2_x_ = prev_x_;
    prev_x_ = xc;
    prev_xhat_ = pred.x_hat;
    prev_v_ = pred.msev;
    return std::max(0.0, b_plus_);
  }

  void reset() override {
    b_plus_ = 0.0;
    prev_x_ = prev2_x_ = prev_xhat_ = prev_v_ = 0.0;
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  double mu_;
  double phi2_;
  double k_;
  double coef_cross_;   // 2 delta / (1 + delta)
  double coef_back_;    // 2 / (delta + 1)
  double coef_back2_;   // (delta - 1) / (delta + 1)
  InnovationsFilter filter_;
  double b_plus_ = 0.0;
  double prev_x_ = 0.0, prev2_x_ = 0.0, prev_xhat_ = 0.0, prev_v_ = 0.0;
};

class SprtChart final : public Chart {
 public:
  SprtChart(const ProcessSpec& spec, double delta_star)
      : mu_(spec.mu), k_(k_ref(delta_star)), filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    filter_.update(xc);
    const double resid = xc - pred.x_hat;
    w_ = std::max(0.0, w_ + resid * resid / pred.msev - k_);
    return w_;
  }

  void reset() override {
    w_ = 0.0;
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  double mu_;
  double k_;
  InnovationsFilter filter_;
  double w_ = 0.0;
};

// Shiryaev-Roberts statistics are kept as log R_n; R_0 = 0 maps to -inf.
class SrIidChart final : public Chart {
 public:
  SrIidChart(const ProcessSpec& spec, double delta_star)
      : mu_(spec.mu),
        gamma0_(stationary_variance(spec)),
        log_delta_(std::log(delta_star)),
        a_(1.0 - 1.0 / (delta_star * delta_star)) {}

  double update(double x) override {
    const double xc = x - mu_;
    ++n_;
    log_r_ = log_add_exp(log_r_, 0.0) - log_delta_ +
             a_ * xc * xc / (2.0 * gamma0_);
    return log_r_;
  }

  void reset() override {
    n_ = 0;
    log_r_ = kNegInf;
  }

  std::int64_t step() const override { return n_; }

 private:
  double mu_;
  double gamma0_;
  double log_delta_;
  double a_;  // 1 - delta^-2
  double log_r_ = kNegInf;
  std::int64_t n_ = 0;
};

class SrAr1Chart final : public Chart {
 public:
  SrAr1Chart(const ProcessSpec& spec, double delta_star)
      : mu_(spec.mu),
        delta_(delta_star),
        log_delta_(std::log(delta_star)),
        a_(1.0 - 1.0 / (delta_star * delta_star)),
        filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    filter_.update(xc);
    const double resid = xc - pred.x_hat;
    const double log_e =
        a_ * (xc * pred.x_hat / (1.0 + delta_) - pred.x_hat * pred.x_hat / 2.0) /
        pred.msev;
    log_r_ = log_add_exp(log_r_, log_e) - log_delta_ +
             a_ * resid * resid / (2.0 * pred.msev);
    return log_r_;
  }

  void reset() override {
    log_r_ = kNegInf;
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  double mu_;
  double delta_;
  double log_delta_;
  double a_;
  InnovationsFilter filter_;
  double log_r_ = kNegInf;
};

// General-process SR statistic.  Candidate i scores the likelihood of the
// path with the tail X_i.. scaled down by delta, evaluated through its own
// copy of the prediction filter; the per-candidate exponents are combined
// with log-sum-exp.  O(n) work and one bounded filter state per candidate.
class SrGenericChart final : public Chart {
 public:
  SrGenericChart(const ProcessSpec& spec, double delta_star)
      : mu_(spec.mu),
        delta_(delta_star),
        log_delta_(std::log(delta_star)),
        filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    candidates_.push_back({filter_, 0.0});  // candidate i = current step + 1
    filter_.update(xc);
    const double resid0 = xc - pred.x_hat;
    const double z = xc / delta_;
    exponents_.clear();
    for (auto& cand : candidates_) {
      const auto pred_z = cand.scaled.predict();
      const double resid_z = z - pred_z.x_hat;
      cand.scaled.update(z);
      cand.exponent += -log_delta_ +
                       (resid0 * resid0 - resid_z * resid_z) / (2.0 * pred.msev);
      exponents_.push_back(cand.exponent);
    }
    log_r_ = log_sum_exp(exponents_);
    return log_r_;
  }

  void reset() override {
    candidates_.clear();
    log_r_ = kNegInf;
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  struct Candidate {
    InnovationsFilter scaled;
    double exponent;
  };

  double mu_;
  double delta_;
  double log_delta_;
  InnovationsFilter filter_;
  std::vector<Candidate> candidates_;
  std::vector<double> exponents_;
  double log_r_ = kNegInf;
};

// Candidate i contributes sup over scales >= 1 of an expression affine in
// (s_dot, s_ddot, m).  Two exact facts keep the per-step scan cheap:
//   - the supremum is positive iff s_dot > m (sign of the derivative at 1);
//   - it is bounded by (s_dot - m)^2 / m, since the quadratic term only
//     lowers the objective and x - 1 - log x <= (x - 1)^2 / 2.
// So most candidates are rejected with a few flops and no sqrt/log.
class GlrChart final : public Chart {
 public:
  GlrChart(const ProcessSpec& spec, std::int64_t window)
      : mu_(spec.mu), window_(window), filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    filter_.update(xc);
    const double resid = xc - pred.x_hat;
    t_ += resid * resid / pred.msev;
    t_at_.push_back(t_);
    r1_.push_back(resid * xc / pred.msev);
    r2_.push_back(xc * xc / pred.msev);
    const std::int64_t size = static_cast<std::int64_t>(t_at_.size());
    if (window_ > 0 && size - head_ > window_) {
      ++head_;
      if (head_ > 4096 && head_ * 2 > size) {
        t_at_.erase(t_at_.begin(), t_at_.begin() + head_);
        r1_.erase(r1_.begin(), r1_.begin() + head_);
        r2_.erase(r2_.begin(), r2_.begin() + head_);
        head_ = 0;
      }
    }
    double best = 0.0;
    const std::int64_t last = static_cast<std::int64_t>(t_at_.size()) - 1;
    for (std::int64_t idx = last; idx >= head_; --idx) {
      const double m = static_cast<double>(last + 1 - idx);
      const double gap = t_ - t_at_[static_cast<std::size_t>(idx)];
      const double s_dot = gap + r1_[static_cast<std::size_t>(idx)];
      const double excess = s_dot - m;
      if (excess <= 0.0 || excess * excess <= best * m) continue;
      const double s_ddot = gap + r2_[static_cast<std::size_t>(idx)];
      const double d = s_dot - s_ddot;
      const double dstar = (d + std::sqrt(d * d + 4.0 * m * s_ddot)) / (2.0 * m);
      if (dstar <= 1.0) continue;
      const double inv = 1.0 / dstar - 1.0;
      const double value =
          -2.0 * m * std::log(dstar) - inv * (2.0 * s_dot + inv * s_ddot);
      if (value > best) best = value;
    }
    return best;
  }

  void reset() override {
    t_ = 0.0;
    head_ = 0;
    t_at_.clear();
    r1_.clear();
    r2_.clear();
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  double mu_;
  std::int64_t window_;
  InnovationsFilter filter_;
  double t_ = 0.0;      // cumulative squared normalized residuals
  std::int64_t head_ = 0;
  std::vector<double> t_at_;  // t_ as of each candidate (inclusive)
  std::vector<double> r1_;    // resid * x / v at each candidate
  std::vector<double> r2_;    // x^2 / v at each candidate
};

// The i = 0 term of the running minimum is 0, and the clamped score is never
// negative, so the minimum stays 0; the subtraction is kept for the record.
class GsprtChart final : public Chart {
 public:
  explicit GsprtChart(const ProcessSpec& spec) : mu_(spec.mu), filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    filter_.update(xc);
    const double resid = xc - pred.x_hat;
    t_ += resid * resid / pred.msev;
    const std::int64_t n = filter_.step();
    const double h =
        h_clamped(static_cast<double>(n), t_ / static_cast<double>(n));
    const double stat = h - running_min_;
    running_min_ = std::min(running_min_, h);
    return stat;
  }

  void reset() override {
    t_ = 0.0;
    running_min_ = 0.0;
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  double mu_;
  InnovationsFilter filter_;
  double t_ = 0.0;
  double running_min_ = 0.0;
};

class GsrIidChart final : public Chart {
 public:
  explicit GsrIidChart(const ProcessSpec& spec)
      : mu_(spec.mu), gamma0_(stationary_variance(spec)) {}

  double update(double x) override {
    const double xc = x - mu_;
    ++n_;
    u_ += static_cast<double>(n_) * xc * xc / gamma0_;
    const double weight = static_cast<double>(n_) * static_cast<double>(n_ + 1);
    return h_clamped(weight, 2.0 * u_ / weight);
  }

  void reset() override {
    n_ = 0;
    u_ = 0.0;
  }

  std::int64_t step() const override { return n_; }

 private:
  double mu_;
  double gamma0_;
  double u_ = 0.0;
  std::int64_t n_ = 0;
};

class GsrAr1Chart final : public Chart {
 public:
  explicit GsrAr1Chart(const ProcessSpec& spec) : mu_(spec.mu), filter_(spec) {}

  double update(double x) override {
    const double xc = x - mu_;
    const auto pred = filter_.predict();
    filter_.update(xc);
    const double resid = xc - pred.x_hat;
    t_ += resid * resid / pred.msev;
    cum_t_ += t_;
    p_ += resid * xc / pred.msev;
    q_ += xc * xc / pred.msev;
    const double n = static_cast<double>(filter_.step());
    const double u_dot = n * t_ - cum_t_ + p_;
    const double u_ddot = n * t_ - cum_t_ + q_;
    const double nn1 = n * (n + 1.0);
    const double d = u_dot - u_ddot;
    const double d_tilde = (d + std::sqrt(d * d + 2.0 * nn1 * u_ddot)) / nn1;
    if (!(d_tilde > 1.0)) return 0.0;
    const double one = 1.0 - 1.0 / d_tilde;
    const double quad = kGsrHalfQuadratic ? 0.5 : 1.0;
    return -nn1 * std::log(d_tilde) + 2.0 * one * u_dot -
           quad * one * one * u_ddot;
  }

  void reset() override {
    t_ = cum_t_ = p_ = q_ = 0.0;
    filter_.reset();
  }

  std::int64_t step() const override { return filter_.step(); }

 private:
  double mu_;
  InnovationsFilter filter_;
  double t_ = 0.0;      // T_n
  double cum_t_ = 0.0;  // sum of T_1..T_n
  double p_ = 0.0;      // sum of resid_k x_k / v_{k-1}
  double q_ = 0.0;      // sum of x_k^2 / v_{k-1}
};

}  // namespace

std::unique_ptr<Chart> make_chart(const ChartConfig& config,
                                  const ProcessSpec& spec) {
  config.validate();
  spec.validate();
  switch (config.scheme) {
    case ChartScheme::kCusumIid:
      return std::make_unique<CusumIidChart>(spec, *config.delta_star);
    case ChartScheme::kLr:
      if (spec.kind == ProcessKind::kAr1) {
        return std::make_unique<LrAr1Chart>(spec, *config.delta_star);
      }
      if (spec.kind == ProcessKind::kAr2) {
        return std::make_unique<LrAr2Chart>(spec, *config.delta_star);
      }
      throw UnsupportedSchemeError(
          "scheme lr has recursions for AR(1) and AR(2) only; "
          "use sprt or gsprt for general processes");
    case ChartScheme::kSprt:
      return std::make_unique<SprtChart>(spec, *config.delta_star);
    case ChartScheme::kSrIid:
      return std::make_unique<SrIidChart>(spec, *config.delta_star);
    case ChartScheme::kSr:
      if (spec.kind == ProcessKind::kAr1) {
        return std::make_unique<SrAr1Chart>(spec, *config.delta_star);
      }
      return std::make_unique<SrGenericChart>(spec, *config.delta_star);
    case ChartScheme::kGlr:
      if (spec.kind != ProcessKind::kAr1) {
        throw UnsupportedSchemeError(
            "scheme glr has a recursion for AR(1) only; "
            "use gsprt for general processes");
      }
      return std::make_unique<GlrChart>(spec, config.glr_window);
    case ChartScheme::kGsprt:
      return std::make_unique<GsprtChart>(spec);
    case ChartScheme::kGsrIid:
      return std::make_unique<GsrIidChart>(spec);
    case ChartScheme::kGsr:
      if (spec.kind != ProcessKind::kAr1) {
        throw UnsupportedSchemeError(
            "scheme gsr has a recursion for AR(1) only; "
            "use gsr_iid or gsprt for general processes");
      }
      return std::make_unique<GsrAr1Chart>(spec);
  }
  throw ValidationError("unknown chart scheme");
}

}  // namespace varcharts
