#include "varcharts/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace varcharts {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

// MA(infinity) weights psi_0, psi_1, ... of the causal solution, extended
// until the tail of sum psi_j^2 falls below a relative mass of 1e-12.
std::vector<double> psi_weights(const ProcessSpec& spec) {
  const int p = spec.ar_order();
  const int q = spec.ma_order();
  std::vector<double> psi{1.0};
  double total = 1.0;
  const int block = std::max({p, q, 8}) * 4;
  const std::size_t hard_cap = 1u << 21;
  while (psi.size() < hard_cap) {
    double block_mass = 0.0;
    for (int b = 0; b < block; ++b) {
      const int j = static_cast<int>(psi.size());
      double w = (j <= q && j >= 1) ? spec.theta[j - 1] : 0.0;
      for (int i = 1; i <= std::min(j, p); ++i) {
        w += spec.phi[i - 1] * psi[j - i];
      }
      psi.push_back(w);
      block_mass += w * w;
    }
    total += block_mass;
    if (psi.size() > static_cast<std::size_t>(p + q + 8) &&
        block_mass <= 1e-13 * total) {
      break;
    }
  }
  if (psi.size() >= hard_cap) {
    throw NumericalError("MA(infinity) expansion did not converge");
  }
  return psi;
}

}  // namespace

ProcessSpec ProcessSpec::ar1(double phi1, double sigma2, double mu) {
  ProcessSpec s;
  s.kind = ProcessKind::kAr1;
  s.phi = {phi1};
  s.sigma2 = sigma2;
  s.mu = mu;
  return s;
}

ProcessSpec ProcessSpec::ar2(double phi1, double phi2, double sigma2,
                             double mu) {
  ProcessSpec s;
  s.kind = ProcessKind::kAr2;
  s.phi = {phi1, phi2};
  s.sigma2 = sigma2;
  s.mu = mu;
  return s;
}

ProcessSpec ProcessSpec::arma(std::vector<double> phi,
                              std::vector<double> theta, double sigma2,
                              double mu) {
  ProcessSpec s;
  s.kind = ProcessKind::kArma;
  s.phi = std::move(phi);
  s.theta = std::move(theta);
  s.sigma2 = sigma2;
  s.mu = mu;
  return s;
}

void ProcessSpec::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ValidationError("process.sigma2 must be a positive finite number");
  }
  if (!std::isfinite(mu)) {
    throw ValidationError("process.mu must be finite");
  }
  if (!finite_all(phi) || !finite_all(theta)) {
    throw ValidationError("process coefficients must be finite");
  }
  if (kind == ProcessKind::kAr1 && (phi.size() != 1 || !theta.empty())) {
    throw ValidationError("process.kind ar1 requires exactly one AR coefficient and no MA part");
  }
  if (kind == ProcessKind::kAr2 && (phi.size() != 2 || !theta.empty())) {
    throw ValidationError("process.kind ar2 requires exactly two AR coefficients and no MA part");
  }
  if (!causality_check(*this)) {
    throw CausalityError("AR polynomial has a root on or inside the unit circle");
  }
}

std::string ProcessSpec::fingerprint() const {
  std::ostringstream os;
  switch (kind) {
    case ProcessKind::kAr1: os << "ar1"; break;
    case ProcessKind::kAr2: os << "ar2"; break;
    case ProcessKind::kArma: os << "arma"; break;
  }
  os << ";phi=";
  for (std::size_t i = 0; i < phi.size(); ++i) {
    os << (i ? " " : "") << format_g17(phi[i]);
  }
  os << ";theta=";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    os << (i ? " " : "") << format_g17(theta[i]);
  }
  os << ";sigma2=" << format_g17(sigma2) << ";mu=" << format_g17(mu);
  return os.str();
}

bool causality_check(const ProcessSpec& spec) {
  const int p = spec.ar_order();
  if (p == 0) return true;
  if (p == 1) return std::abs(spec.phi[0]) < 1.0;
  if (p == 2) {
    const double phi1 = spec.phi[0];
    const double phi2 = spec.phi[1];
    return phi1 + phi2 < 1.0 && phi2 - phi1 < 1.0 && std::abs(phi2) < 1.0;
  }
  // Schur-Cohn step-down: the spec is causal iff every reflection
  // coefficient of the AR polynomial has modulus < 1.
  std::vector<double> a = spec.phi;
  for (int order = p; order >= 1; --order) {
    const double k = a[order - 1];
    if (!(std::abs(k) < 1.0)) return false;
    std::vector<double> b(order - 1);
    const double denom = 1.0 - k * k;
    for (int i = 0; i < order - 1; ++i) {
      b[i] = (a[i] + k * a[order - 2 - i]) / denom;
    }
    a = std::move(b);
  }
  return true;
}

double stationary_variance(const ProcessSpec& spec) {
  if (!causality_check(spec)) {
    throw CausalityError("stationary variance requires a causal process");
  }
  return autocovariance(spec, 0);
}

double autocovariance(const ProcessSpec& spec, int lag) {
  if (!causality_check(spec)) {
    throw CausalityError("autocovariance requires a causal process");
  }
  lag = std::abs(lag);
  if (spec.kind == ProcessKind::kAr1) {
    const double phi1 = spec.phi[0];
    const double gamma0 = spec.sigma2 / (1.0 - phi1 * phi1);
    return gamma0 * std::pow(phi1, lag);
  }
  if (spec.kind == ProcessKind::kAr2) {
    const double phi1 = spec.phi[0];
    const double phi2 = spec.phi[1];
    const double gamma0 = spec.sigma2 * (1.0 - phi2) /
                          ((1.0 + phi2) * ((1.0 - phi2) * (1.0 - phi2) - phi1 * phi1));
    if (lag == 0) return gamma0;
    const double gamma1 = phi1 * gamma0 / (1.0 - phi2);
    if (lag == 1) return gamma1;
    double gm2 = gamma0, gm1 = gamma1, g = gamma1;
    for (int h = 2; h <= lag; ++h) {
      g = phi1 * gm1 + phi2 * gm2;
      gm2 = gm1;
      gm1 = g;
    }
    return g;
  }
  const std::vector<double> psi = psi_weights(spec);
  double acc = 0.0;
  for (std::size_t j = 0; j + lag < psi.size(); ++j) {
    acc += psi[j] * psi[j + lag];
  }
  return spec.sigma2 * acc;
}

void ChangeSpec::validate() const {
  if (tau < 1) {
    throw ValidationError("change.tau must be a positive index (or infinity)");
  }
  if (!(delta >= 1.0) || !std::isfinite(delta)) {
    throw ValidationError("change.delta must be a finite number >= 1");
  }
}

// ---------------------------------------------------------------------------
// InnovationsFilter
// ---------------------------------------------------------------------------

InnovationsFilter::InnovationsFilter(const ProcessSpec& spec) : spec_(spec) {
  spec_.validate();
  reset();
}

void InnovationsFilter::reset() {
  step_ = 0;
  last_ = last2_ = 0.0;
  gamma0_ = stationary_variance(spec_);
  if (spec_.kind == ProcessKind::kAr2) {
    const double phi1 = spec_.phi[0];
    const double phi2 = spec_.phi[1];
    const double r = phi1 / (1.0 - phi2);
    v1_ = gamma0_ * (1.0 - r * r);
  }
  if (spec_.kind != ProcessKind::kArma) return;

  const int p = spec_.ar_order();
  const int q = spec_.ma_order();
  m_ = std::max(p, q);
  rows_done_ = 0;
  theta_rows_.clear();
  r_.clear();
  recent_x_.assign(std::max(p, 1), 0.0);
  recent_innov_.assign(std::max(m_, 1), 0.0);
  kappa_gamma_.clear();
  for (int h = 0; h <= 2 * m_ + 1; ++h) {
    kappa_gamma_.push_back(autocovariance(spec_, h) / spec_.sigma2);
  }
  r_.push_back(kappa(1, 1));  // r_0
  next_x_hat_ = 0.0;
  next_msev_ = spec_.sigma2 * r_.front();
  if (!(next_msev_ > 0.0)) {
    throw NumericalError("non-positive prediction mean-square error");
  }
}

// Covariance kernel of the transformed process used by the innovations
// recursion; banded with bandwidth max(p, q).
double InnovationsFilter::kappa(std::int64_t i, std::int64_t j) const {
  if (i < j) std::swap(i, j);
  const std::int64_t h = i - j;
  const int p = spec_.ar_order();
  const int q = spec_.ma_order();
  if (i <= m_) {
    return kappa_gamma_[static_cast<std::size_t>(h)];
  }
  if (j <= m_ && i <= 2 * m_) {
    double v = kappa_gamma_[static_cast<std::size_t>(h)];
    for (int r = 1; r <= p; ++r) {
      v -= spec_.phi[r - 1] *
           kappa_gamma_[static_cast<std::size_t>(std::abs(r - h))];
    }
    return v;
  }
  if (j > m_) {
    if (h > q) return 0.0;
    double v = 0.0;
    for (int r = 0; r + h <= q; ++r) {
      const double tr = (r == 0) ? 1.0 : spec_.theta[r - 1];
      const double trh = (r + h == 0) ? 1.0 : spec_.theta[r + h - 1];
      v += tr * trh;
    }
    return v;
  }
  return 0.0;
}

// Compute the innovations row n = rows_done_ + 1: theta_{n,1..min(n,m)} and
// r_n.  Rows older than m are discarded; r keeps a matching window.
void InnovationsFilter::generic_advance_row() {
  const std::int64_t n = rows_done_ + 1;
  const std::int64_t k_lo = std::max<std::int64_t>(0, n - m_);
  std::vector<double> row(static_cast<std::size_t>(std::min<std::int64_t>(n, m_)), 0.0);

  // r_ holds r_{r_base}..r_{rows_done_} with r_base = rows_done_ + 1 - size.
  const std::int64_t r_base = rows_done_ + 1 - static_cast<std::int64_t>(r_.size());
  auto r_at = [&](std::int64_t idx) { return r_[static_cast<std::size_t>(idx - r_base)]; };
  // theta_rows_ holds rows rows_done_ - size + 1 .. rows_done_.
  const std::int64_t row_base = rows_done_ - static_cast<std::int64_t>(theta_rows_.size()) + 1;
  auto theta_at = [&](std::int64_t rown, std::int64_t j) -> double {
    // theta_{rown, j}; zero outside the stored band.
    if (j < 1 || j > std::min<std::int64_t>(rown, m_)) return 0.0;
    if (rown == n) return row[static_cast<std::size_t>(j - 1)];
    if (rown < row_base) return 0.0;
    const auto& r = theta_rows_[static_cast<std::size_t>(rown - row_base)];
    return r[static_cast<std::size_t>(j - 1)];
  };

  // Ascending k: each theta_{n,n-k} may use the theta_{n,n-j} (j < k)
  // already written into `row`.
  for (std::int64_t k = k_lo; k <= n - 1; ++k) {
    double acc = kappa(n + 1, k + 1);
    for (std::int64_t j = std::max<std::int64_t>(0, n - m_); j <= k - 1; ++j) {
      acc -= theta_at(k, k - j) * theta_at(n, n - j) * r_at(j);
    }
    row[static_cast<std::size_t>(n - k - 1)] = acc / r_at(k);
  }
  double rn = kappa(n + 1, n + 1);
  for (std::int64_t j = std::max<std::int64_t>(0, n - m_); j <= n - 1; ++j) {
    const double t = row[static_cast<std::size_t>(n - j - 1)];
    rn -= t * t * r_at(j);
  }
  if (!(rn > 0.0)) {
    throw NumericalError("non-positive prediction mean-square error");
  }

  theta_rows_.push_back(std::move(row));
  while (static_cast<std::int64_t>(theta_rows_.size()) > m_) {
    theta_rows_.erase(theta_rows_.begin());
  }
  r_.push_back(rn);
  while (static_cast<std::int64_t>(r_.size()) > m_ + 1) {
    r_.erase(r_.begin());
  }
  rows_done_ = n;
}

InnovationsFilter::Prediction InnovationsFilter::predict() const {
  const std::int64_t t = step_ + 1;
  switch (spec_.kind) {
    case ProcessKind::kAr1:
      if (t == 1) return {0.0, gamma0_};
      return {spec_.phi[0] * last_, spec_.sigma2};
    case ProcessKind::kAr2:
      if (t == 1) return {0.0, gamma0_};
      if (t == 2) return {spec_.phi[0] / (1.0 - spec_.phi[1]) * last_, v1_};
      return {spec_.phi[0] * last_ + spec_.phi[1] * last2_, spec_.sigma2};
    case ProcessKind::kArma:
      break;
  }
  if (m_ == 0) return {0.0, spec_.sigma2};
  return {next_x_hat_, next_msev_};
}

void InnovationsFilter::update(double x) {
  if (spec_.kind != ProcessKind::kArma) {
    last2_ = last_;
    last_ = x;
    ++step_;
    return;
  }
  ++step_;
  if (m_ == 0) return;

  const double innovation = x - next_x_hat_;
  // Rings hold the most recent values; index 0 is the newest.
  std::rotate(recent_x_.rbegin(), recent_x_.rbegin() + 1, recent_x_.rend());
  recent_x_[0] = x;
  std::rotate(recent_innov_.rbegin(), recent_innov_.rbegin() + 1,
              recent_innov_.rend());
  recent_innov_[0] = innovation;

  generic_advance_row();  // row n = step_, gives theta_{n,.} and r_n

  const std::int64_t n = step_;
  const int p = spec_.ar_order();
  const int q = spec_.ma_order();
  const auto& row = theta_rows_.back();
  double x_hat = 0.0;
  if (n < m_) {
    for (std::int64_t j = 1; j <= n; ++j) {
      x_hat += row[static_cast<std::size_t>(j - 1)] *
               recent_innov_[static_cast<std::size_t>(j - 1)];
    }
  } else {
    for (int i = 1; i <= p; ++i) {
      x_hat += spec_.phi[i - 1] * recent_x_[static_cast<std::size_t>(i - 1)];
    }
    for (int j = 1; j <= q; ++j) {
      x_hat += row[static_cast<std::size_t>(j - 1)] *
               recent_innov_[static_cast<std::size_t>(j - 1)];
    }
  }
  next_x_hat_ = x_hat;
  next_msev_ = spec_.sigma2 * r_.back();
  if (!(next_msev_ > 0.0)) {
    throw NumericalError("non-positive prediction mean-square error");
  }
}

// ---------------------------------------------------------------------------
// PathGenerator
// ---------------------------------------------------------------------------

PathGenerator::PathGenerator(const ProcessSpec& spec, const ChangeSpec& change,
                             std::uint64_t seed, std::uint64_t stream)
    : spec_(spec), change_(change), rng_(seed, stream), filter_(spec) {
  change_.validate();
}

double PathGenerator::next() {
  ++t_;
  const auto pred = filter_.predict();
  const double y = pred.x_hat + std::sqrt(pred.msev) * rng_.next_normal();
  filter_.update(y);
  const double scale = (t_ >= change_.tau) ? change_.delta : 1.0;
  return spec_.mu + scale * y;
}

void PathGenerator::restart(std::uint64_t seed, std::uint64_t stream) {
  rng_.reseed(seed, stream);
  filter_.reset();
  t_ = 0;
}

}  // namespace varcharts
