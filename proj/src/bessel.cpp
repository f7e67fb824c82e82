#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sblfem/problems.hpp"

namespace sblfem::problems {

namespace {

constexpr double kSeriesLimit = 30.0;

// All terms positive, so the partial sums are accurate to rounding.
double scaled_series(int nu, double x) {
  const double q = 0.25 * x * x;
  double term = nu == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 0; k < 500; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum * std::exp(-x);
}

// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k.
double scaled_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) > std::abs(term)) break;  // divergent tail
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double scaled_bessel_i(int nu, double x) {
  if (nu != 0 && nu != 1) throw std::invalid_argument("scaled_bessel_i: order must be 0 or 1");
  if (!(x >= 0.0)) throw std::invalid_argument("scaled_bessel_i: argument must be >= 0");
  return x <= kSeriesLimit ? scaled_series(nu, x) : scaled_asymptotic(nu, x);
}

}  // namespace sblfem::problems
