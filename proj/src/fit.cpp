#include "sblfem/fit.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sblfem::fit {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.n = n;
  return f;
}

ExpFit fit_exponential(std::span<const double> p, std::span<const double> err, double floor) {
  if (p.size() != err.size()) throw std::invalid_argument("fit_exponential: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(err[i]) || err[i] <= floor) continue;
    xs.push_back(p[i]);
    ys.push_back(std::log(err[i]));
  }
  const LineFit l = fit_line(xs, ys);
  return {-l.slope, l.intercept, l.r2, l.n};
}

double fit_power_exponent(std::span<const double> eps, std::span<const double> value) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    xs.push_back(std::log(eps[i]));
    ys.push_back(std::log(value[i]));
  }
  return fit_line(xs, ys).slope;
}

}  // namespace sblfem::fit
