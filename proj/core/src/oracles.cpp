#include "varcharts/oracles.hpp"

#include <cmath>
#include <vector>

#include "varcharts/errors.hpp"
#include "varcharts/numerics.hpp"

namespace varcharts::oracle {

namespace {

// Centered path plus closed-form one-step predictors; entries are 1-indexed
// through index 0 padding to keep the sums readable.
struct Frame {
  std::vector<double> x;     // x[1..n] centered observations
  std::vector<double> xhat;  // xhat[1..n]
  std::vector<double> v;     // v[j] = mean-square error of xhat[j] (= v_{j-1})
  int n = 0;
};

Frame build_frame(std::span<const double> path, const ProcessSpec& spec) {
  if (path.size() > 1000) {
    throw DomainError("reference evaluators accept paths of length <= 1000");
  }
  spec.validate();
  Frame f;
  f.n = static_cast<int>(path.size());
  f.x.assign(f.n + 1, 0.0);
  f.xhat.assign(f.n + 1, 0.0);
  f.v.assign(f.n + 1, 0.0);
  for (int j = 1; j <= f.n; ++j) f.x[j] = path[j - 1] - spec.mu;

  if (spec.kind == ProcessKind::kAr1) {
    const double phi = spec.phi[0];
    const double gamma0 = spec.sigma2 / (1.0 - phi * phi);
    for (int j = 1; j <= f.n; ++j) {
      f.xhat[j] = (j == 1) ? 0.0 : phi * f.x[j - 1];
      f.v[j] = (j == 1) ? gamma0 : spec.sigma2;
    }
  } else if (spec.kind == ProcessKind::kAr2) {
    const double phi1 = spec.phi[0];
    const double phi2 = spec.phi[1];
    const double gamma0 =
        spec.sigma2 * (1.0 - phi2) /
        ((1.0 + phi2) * ((1.0 - phi2) * (1.0 - phi2) - phi1 * phi1));
    const double a21 = phi1 / (1.0 - phi2);
    for (int j = 1; j <= f.n; ++j) {
      if (j == 1) {
        f.xhat[j] = 0.0;
        f.v[j] = gamma0;
      } else if (j == 2) {
        f.xhat[j] = a21 * f.x[1];
        f.v[j] = gamma0 * (1.0 - a21 * a21);
      } else {
        f.xhat[j] = phi1 * f.x[j - 1] + phi2 * f.x[j - 2];
        f.v[j] = spec.sigma2;
      }
    }
  } else {
    throw UnsupportedSchemeError(
        "reference evaluators cover AR(1) and AR(2) processes");
  }
  return f;
}

// Partial predictor T_{j,tau} = sum_{v=tau}^{j-1} a_{jv} x_v.
double t_partial(const Frame& f, const ProcessSpec& spec, int j, int tau) {
  if (j <= tau) return 0.0;
  if (spec.kind == ProcessKind::kAr1) {
    return spec.phi[0] * f.x[j - 1];  // equals xhat[j] for j >= 2
  }
  // AR(2)
  if (j >= tau + 2) return f.xhat[j];
  // j == tau + 1
  if (j == 2) return f.xhat[2];
  return spec.phi[0] * f.x[tau];
}

double h_inline(double weight, double x) {
  return (x > 1.0) ? weight * (x - 1.0 - std::log(x)) / 2.0 : 0.0;
}

}  // namespace

double cusum_iid(std::span<const double> path, const ProcessSpec& spec,
                 double delta_star) {
  spec.validate();
  if (path.size() > 1000) {
    throw DomainError("reference evaluators accept paths of length <= 1000");
  }
  const double gamma0 = stationary_variance(spec);
  const double k = std::log(delta_star * delta_star) /
                   (1.0 - 1.0 / (delta_star * delta_star));
  double s = 0.0, min_s = 0.0;
  for (double raw : path) {
    const double xc = raw - spec.mu;
    s += xc * xc / gamma0 - k;
    min_s = std::min(min_s, s);
  }
  return s - min_s;
}

double lr(std::span<const double> path, const ProcessSpec& spec,
          double delta_star) {
  const Frame f = build_frame(path, spec);
  if (f.n == 0) return 0.0;
  const double d = delta_star;
  const double one_minus = 1.0 - 1.0 / d;
  const double factor = 1.0 - 1.0 / (d * d);
  // The AR(2) recursion scores each candidate one observation after it
  // appears, so its candidate set at time n is {1..n-1} (plus {1} at n = 1).
  const int tau_hi = (spec.kind == ProcessKind::kAr2 && f.n >= 2) ? f.n - 1 : f.n;
  double best = -std::numeric_limits<double>::infinity();
  for (int tau = 1; tau <= tau_hi; ++tau) {
    double acc = -(f.n - tau + 1) * std::log(d * d);
    for (int j = tau; j <= f.n; ++j) {
      const double resid = f.x[j] - f.xhat[j];
      const double gap = f.x[j] - t_partial(f, spec, j, tau);
      acc += (2.0 * one_minus * resid * gap - one_minus * one_minus * gap * gap) /
             f.v[j];
    }
    best = std::max(best, acc);
  }
  return std::max(0.0, best / factor);
}

double sprt(std::span<const double> path, const ProcessSpec& spec,
            double delta_star) {
  const Frame f = build_frame(path, spec);
  const double k = std::log(delta_star * delta_star) /
                   (1.0 - 1.0 / (delta_star * delta_star));
  double s = 0.0, min_s = 0.0;
  for (int j = 1; j <= f.n; ++j) {
    const double resid = f.x[j] - f.xhat[j];
    s += resid * resid / f.v[j] - k;
    min_s = std::min(min_s, s);
  }
  return s - min_s;
}

double sr_iid_log(std::span<const double> path, const ProcessSpec& spec,
                  double delta_star) {
  spec.validate();
  if (path.size() > 1000) {
    throw DomainError("reference evaluators accept paths of length <= 1000");
  }
  const int n = static_cast<int>(path.size());
  if (n == 0) return kNegInf;
  const double gamma0 = stationary_variance(spec);
  const double d = delta_star;
  const double a = 1.0 - 1.0 / (d * d);
  std::vector<double> exponents;
  for (int i = 1; i <= n; ++i) {
    double acc = -(n - i + 1) * std::log(d);
    for (int j = i; j <= n; ++j) {
      const double xc = path[j - 1] - spec.mu;
      acc += a * xc * xc / (2.0 * gamma0);
    }
    exponents.push_back(acc);
  }
  return log_sum_exp(exponents);
}

double sr_log(std::span<const double> path, const ProcessSpec& spec,
              double delta_star) {
  const Frame f = build_frame(path, spec);
  if (f.n == 0) return kNegInf;
  const double d = delta_star;
  const double one_minus = 1.0 - 1.0 / d;
  std::vector<double> exponents;
  for (int i = 1; i <= f.n; ++i) {
    double acc = -(f.n - i + 1) * std::log(d);
    for (int j = i; j <= f.n; ++j) {
      const double resid = f.x[j] - f.xhat[j];
      const double gap = f.x[j] - t_partial(f, spec, j, i);
      acc += (one_minus * resid * gap - 0.5 * one_minus * one_minus * gap * gap) /
             f.v[j];
    }
    exponents.push_back(acc);
  }
  return log_sum_exp(exponents);
}

double glr(std::span<const double> path, const ProcessSpec& spec) {
  const Frame f = build_frame(path, spec);
  double best = 0.0;
  for (int tau = 1; tau <= f.n; ++tau) {
    double s_dot = 0.0, s_ddot = 0.0;
    for (int j = tau; j <= f.n; ++j) {
      const double resid = f.x[j] - f.xhat[j];
      const double gap = f.x[j] - t_partial(f, spec, j, tau);
      s_dot += resid * gap / f.v[j];
      s_ddot += gap * gap / f.v[j];
    }
    const double m = static_cast<double>(f.n - tau + 1);
    const double diff = s_dot - s_ddot;
    const double dstar =
        std::max(1.0, (diff + std::sqrt(diff * diff + 4.0 * m * s_ddot)) / (2.0 * m));
    if (dstar > 1.0) {
      const double inv = 1.0 / dstar - 1.0;
      best = std::max(best, -2.0 * m * std::log(dstar) -
                                inv * (2.0 * s_dot + inv * s_ddot));
    }
  }
  return best;
}

double gsprt(std::span<const double> path, const ProcessSpec& spec) {
  const Frame f = build_frame(path, spec);
  if (f.n == 0) return 0.0;
  std::vector<double> t(f.n + 1, 0.0);
  for (int j = 1; j <= f.n; ++j) {
    const double resid = f.x[j] - f.xhat[j];
    t[j] = t[j - 1] + resid * resid / f.v[j];
  }
  const double hn = h_inline(f.n, t[f.n] / f.n);
  double best = hn;  // i = 0 term contributes h_0 = 0
  for (int i = 1; i <= f.n; ++i) {
    best = std::max(best, hn - h_inline(i, t[i] / i));
  }
  return best;
}

double gsr_iid(std::span<const double> path, const ProcessSpec& spec) {
  spec.validate();
  if (path.size() > 1000) {
    throw DomainError("reference evaluators accept paths of length <= 1000");
  }
  const int n = static_cast<int>(path.size());
  if (n == 0) return 0.0;
  const double gamma0 = stationary_variance(spec);
  double u = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double xc = path[i - 1] - spec.mu;
    u += i * xc * xc / gamma0;
  }
  const double weight = static_cast<double>(n) * (n + 1.0);
  return h_inline(weight, 2.0 * u / weight);
}

double gsr(std::span<const double> path, const ProcessSpec& spec) {
  const Frame f = build_frame(path, spec);
  if (f.n == 0) return 0.0;
  double u_dot = 0.0, u_ddot = 0.0;
  for (int k = 1; k <= f.n; ++k) {
    for (int j = k; j <= f.n; ++j) {
      const double resid = f.x[j] - f.xhat[j];
      const double gap = f.x[j] - t_partial(f, spec, j, k);
      u_dot += resid * gap / f.v[j];
      u_ddot += gap * gap / f.v[j];
    }
  }
  const double nn1 = static_cast<double>(f.n) * (f.n + 1.0);
  const double d = u_dot - u_ddot;
  const double d_tilde = (d + std::sqrt(d * d + 2.0 * nn1 * u_ddot)) / nn1;
  if (!(d_tilde > 1.0)) return 0.0;
  const double one = 1.0 - 1.0 / d_tilde;
#ifdef VARCHARTS_GSR_HALF_QUADRATIC
  const double quad = 0.5;
#else
  const double quad = 1.0;
#endif
  return -nn1 * std::log(d_tilde) + 2.0 * one * u_dot - quad * one * one * u_ddot;
}

}  // namespace varcharts::oracle
