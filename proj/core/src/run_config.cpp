#include "varcharts/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace varcharts {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ProcessSpec RunConfig::process() const {
  std::string k = kind;
  if (k == "auto") {
    if (theta.empty() && phi.size() <= 1) {
      k = "ar1";
    } else if (theta.empty() && phi.size() == 2) {
      k = "ar2";
    } else {
      k = "arma";
    }
  }
  ProcessSpec spec;
  if (k == "ar1") {
    if (phi.size() > 1 || !theta.empty()) {
      throw ValidationError(
          "process.kind ar1 takes at most one --phi value and no --theta");
    }
    spec = ProcessSpec::ar1(phi.empty() ? 0.0 : phi[0], sigma2, mu);
  } else if (k == "ar2") {
    if (phi.size() != 2 || !theta.empty()) {
      throw ValidationError(
          "process.kind ar2 requires exactly two --phi values and no --theta");
    }
    spec = ProcessSpec::ar2(phi[0], phi[1], sigma2, mu);
  } else if (k == "arma") {
    spec = ProcessSpec::arma(phi, theta, sigma2, mu);
  } else {
    throw ValidationError("process.kind must be one of ar1, ar2, arma, auto");
  }
  spec.validate();
  return spec;
}

ChangeSpec RunConfig::change() const {
  ChangeSpec c = (tau == 0) ? ChangeSpec{kNoChange, delta}
                            : ChangeSpec{tau, delta};
  c.validate();
  return c;
}

ChartConfig RunConfig::chart() const {
  if (scheme.empty()) {
    throw ValidationError("chart.scheme is required (--scheme)");
  }
  ChartConfig config;
  config.scheme = scheme_from_string(scheme);
  config.delta_star = delta_star;
  config.limit = limit;
  config.glr_window = glr_window;
  config.validate();
  return config;
}

std::int64_t RunConfig::effective_reps() const {
  if (reps > 0) return reps;
  if (!scheme.empty() && scheme_from_string(scheme) == ChartScheme::kGlr) {
    return 10000;
  }
  return 100000;
}

CalibrationTarget RunConfig::calibration_target() const {
  CalibrationTarget t;
  t.target_arl = target_arl;
  t.rel_tol = rel_tol;
  t.reps = effective_reps();
  t.seed = seed;
  t.cap = cap;
  t.workers = workers;
  t.validate();
  return t;
}

SimOptions RunConfig::sim_options() const {
  SimOptions o;
  o.reps = effective_reps();
  o.seed = seed;
  o.cap = cap > 0 ? cap : calibration_target().effective_cap();
  o.workers = workers;
  return o;
}

ExperimentGrid RunConfig::experiment_grid() const {
  ExperimentGrid g = ExperimentGrid::defaults();
  if (!phis.empty()) g.phis = phis;
  if (!deltas.empty()) g.deltas = deltas;
  if (!delta_stars.empty()) g.delta_stars = delta_stars;
  if (!schemes.empty()) {
    g.schemes.clear();
    for (const auto& name : schemes) {
      if (name == "all") {
        g.schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
        break;
      }
      g.schemes.push_back(scheme_from_string(name));
    }
  }
  g.sigma2 = sigma2;
  g.mu = mu;
  if (reps > 0) {
    g.reps = reps;
    g.glr_reps = std::min<std::int64_t>(reps, 10000);
  }
  for (double phi1 : g.phis) {
    ProcessSpec::ar1(phi1, g.sigma2, g.mu).validate();
  }
  for (double star : g.delta_stars) {
    if (!(star > 1.0)) {
      throw ValidationError("every delta_star in the grid must be > 1");
    }
  }
  for (double d : g.deltas) {
    if (!(d >= 1.0)) {
      throw ValidationError("every delta in the grid must be >= 1");
    }
  }
  if (g.phis.empty() || g.deltas.empty() || g.delta_stars.empty() ||
      g.schemes.empty()) {
    throw ValidationError("experiment grids must be non-empty");
  }
  return g;
}

void RunConfig::validate() const {
  process();
  change();
  if (!scheme.empty()) chart();
  calibration_target();
  if (workers < 0) throw ValidationError("sim.workers must be >= 0");
  if (reps < 0) throw ValidationError("sim.reps must be >= 0 (0 = auto)");
  if (tau < 0) throw ValidationError("change.tau must be >= 0 (0 = no change)");
  if (tau_max < 1) throw ValidationError("tau_max must be >= 1");
  if (format != "csv") {
    throw ValidationError("output.format: only csv is supported");
  }
  if (table_mode != "arl" && table_mode != "delay") {
    throw ValidationError("table mode must be arl or delay");
  }
  if (out_dir.empty()) {
    throw ValidationError("output.dir must be non-empty");
  }
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  auto list = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + g17(v[i]);
    return s;
  };
  os << "kind=" << kind << ";phi=" << list(phi) << ";theta=" << list(theta)
     << ";sigma2=" << g17(sigma2) << ";mu=" << g17(mu) << ";delta=" << g17(delta)
     << ";tau=" << tau << ";scheme=" << scheme
     << ";delta_star=" << (delta_star ? g17(*delta_star) : "-")
     << ";limit=" << (limit ? g17(*limit) : "-") << ";glr_window=" << glr_window
     << ";reps=" << reps << ";cap=" << cap << ";seed=" << seed
     << ";workers=" << workers << ";target_arl=" << g17(target_arl)
     << ";rel_tol=" << g17(rel_tol) << ";phis=" << list(phis)
     << ";deltas=" << list(deltas) << ";delta_stars=" << list(delta_stars)
     << ";schemes=";
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    os << (i ? " " : "") << schemes[i];
  }
  os << ";tau_max=" << tau_max;
  return os.str();
}

std::string RunConfig::config_hash() const {
  // FNV-1a, 64 bit.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace varcharts
