#pragma once

// Least-squares fits used by the convergence studies.

#include <cstddef>
#include <span>

namespace sblfem::fit {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// ln(err) = ln C - beta p.
struct ExpFit {
  double beta = 0.0;
  double log_c = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;  ///< rows used
};

/// Rows with err <= floor (solver precision) or non-finite err are left out.
ExpFit fit_exponential(std::span<const double> p, std::span<const double> err, double floor = 1e-12);

/// Slope of ln(value) against ln(eps).
double fit_power_exponent(std::span<const double> eps, std::span<const double> value);

}  // namespace sblfem::fit
