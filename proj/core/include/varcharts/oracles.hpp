#pragma once

#include <span>

#include "varcharts/process.hpp"

// Reference evaluators: each statistic computed by literal summation or
// maximization over all candidate change points, with predictors and
// mean-square errors written out in closed form.  No recursions, no shared
// code with the incremental charts; quadratic or cubic cost.  Intended for
// tests and cross-checks on short paths (length <= 1000).
namespace varcharts::oracle {

double cusum_iid(std::span<const double> path, const ProcessSpec& spec,
                 double delta_star);

/// AR(1)/AR(2) likelihood-ratio chart statistic (the scaled -2 log ratio with
/// the constant (1 - delta^-2) factor removed, clipped at zero).
double lr(std::span<const double> path, const ProcessSpec& spec,
          double delta_star);

double sprt(std::span<const double> path, const ProcessSpec& spec,
            double delta_star);

/// log R_n by direct log-sum-exp over all candidate change points.
double sr_iid_log(std::span<const double> path, const ProcessSpec& spec,
                  double delta_star);
double sr_log(std::span<const double> path, const ProcessSpec& spec,
              double delta_star);

double glr(std::span<const double> path, const ProcessSpec& spec);

double gsprt(std::span<const double> path, const ProcessSpec& spec);

double gsr_iid(std::span<const double> path, const ProcessSpec& spec);
double gsr(std::span<const double> path, const ProcessSpec& spec);

}  // namespace varcharts::oracle
