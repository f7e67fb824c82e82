#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sblfem/fit.hpp"

using namespace sblfem;

TEST_CASE("exact exponential data") {
  std::vector<double> p, e;
  for (int k = 3; k <= 12; ++k) {
    p.push_back(k);
    e.push_back(5.0 * std::exp(-0.7 * k));
  }
  const auto f = fit::fit_exponential(p, e);
  CHECK(f.beta == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.log_c == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.n == 10);
}

TEST_CASE("rows at the floor or non-finite are dropped") {
  const std::vector<double> p{1, 2, 3, 4, 5};
  const std::vector<double> e{std::exp(-1.0), std::exp(-2.0), 1e-14, std::numeric_limits<double>::quiet_NaN(), std::exp(-5.0)};
  const auto f = fit::fit_exponential(p, e);
  CHECK(f.n == 3);
  CHECK(f.beta == doctest::Approx(1.0));
}

TEST_CASE("line fit R^2 against a hand computation") {
  // y = (1, 2, 2, 4) at x = (0, 1, 2, 3): slope 0.9, intercept 0.9, R^2 = 0.81*5/4.75.
  const std::vector<double> x{0, 1, 2, 3}, y{1, 2, 2, 4};
  const auto l = fit::fit_line(x, y);
  CHECK(l.slope == doctest::Approx(0.9));
  CHECK(l.intercept == doctest::Approx(0.9));
  CHECK(l.r2 == doctest::Approx(0.81 * 5.0 / 4.75));
}

TEST_CASE("power exponent") {
  const std::vector<double> eps{1e-2, 1e-4, 1e-6};
  std::vector<double> v;
  for (double e : eps) v.push_back(3.0 * std::sqrt(e));
  CHECK(fit::fit_power_exponent(eps, v) == doctest::Approx(0.5));
}

TEST_CASE("mismatched sizes are rejected") {
  const std::vector<double> a{1, 2}, b{1};
  CHECK_THROWS_AS(fit::fit_exponential(a, b), std::invalid_argument);
}
