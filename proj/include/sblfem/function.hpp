#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace sblfem {

/// Value and derivatives 0..4 of a scalar function at a point. Producers fill
/// as many orders as they can; consumers document which orders they read.
using Jet = std::array<double, 5>;

using ScalarFn = std::function<double(double)>;
using JetFn = std::function<Jet(double)>;

/// Element-aware evaluation for piecewise functions: (element index, x).
using ElementJetFn = std::function<Jet(std::size_t, double)>;

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r{};
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r{};
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Jet operator*(double s, const Jet& a) {
  Jet r{};
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = s * a[i];
  return r;
}

inline ElementJetFn element_agnostic(JetFn f) {
  return [f = std::move(f)](std::size_t, double x) { return f(x); };
}

}  // namespace sblfem
