#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace memkit::quadrature {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
Rule gauss_legendre(std::size_t n);

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {
constexpr int kMaxLevels = 9;
constexpr int kMinLevels = 3;
}  // namespace detail

/// Tanh-sinh (double exponential) quadrature on a finite interval [lo, hi].
/// Integrable endpoint singularities are fine at the left endpoint when lo is
/// exactly representable as the singular point (nodes are placed as lo + d and
/// hi - d so offsets near the endpoints do not round away).
template <class F>
Result tanh_sinh(F&& f, double lo, double hi, double rel_tol = 1e-15) {
  const double half = 0.5 * (hi - lo);
  const double mid = lo + half;
  constexpr double kTMax = 4.0;
  constexpr double kHalfPi = 0.5 * std::numbers::pi;

  Result out;
  auto add_pair = [&](double t) {
    const double u = kHalfPi * std::sinh(t);
    const double e = std::exp(-2.0 * u);
    const double offset = half * 2.0 * e / (1.0 + e);  // half * (1 - tanh(u))
    const double ch = std::cosh(u);
    const double w = kHalfPi * std::cosh(t) / (ch * ch);
    if (!(offset > 0.0) || !std::isfinite(w)) return 0.0;
    out.evaluations += 2;
    return w * (f(lo + offset) + f(hi - offset));
  };

  double h = 1.0;
  double sum = kHalfPi * f(mid);
  out.evaluations = 1;
  for (double t = h; t <= kTMax; t += h) sum += add_pair(t);
  double estimate = half * h * sum;

  for (int level = 1; level < detail::kMaxLevels; ++level) {
    h *= 0.5;
    for (double t = h; t <= kTMax; t += 2.0 * h) sum += add_pair(t);
    const double refined = half * h * sum;
    out.error_estimate = std::fabs(refined - estimate);
    estimate = refined;
    if (level >= detail::kMinLevels &&
        out.error_estimate <= rel_tol * std::fabs(estimate)) {
      break;
    }
  }
  out.value = estimate;
  return out;
}

/// Double exponential quadrature on [lo, infinity) for integrands that decay
/// at least exponentially. Substitution r = lo + exp(t - exp(-t)).
template <class F>
Result exp_decay(F&& f, double lo, double rel_tol = 1e-15) {
  constexpr double kTMin = -4.5;
  constexpr double kTMax = 5.0;

  Result out;
  auto term = [&](double t) {
    const double et = std::exp(-t);
    const double phi = std::exp(t - et);
    const double w = phi * (1.0 + et);
    out.evaluations += 1;
    return w * f(lo + phi);
  };

  double h = 0.5;
  double sum = 0.0;
  for (double t = kTMin; t <= kTMax; t += h) sum += term(t);
  double estimate = h * sum;

  for (int level = 1; level < detail::kMaxLevels; ++level) {
    h *= 0.5;
    for (double t = kTMin + h; t <= kTMax; t += 2.0 * h) sum += term(t);
    const double refined = h * sum;
    out.error_estimate = std::fabs(refined - estimate);
    estimate = refined;
    if (level >= detail::kMinLevels &&
        out.error_estimate <= rel_tol * std::fabs(estimate)) {
      break;
    }
  }
  out.value = estimate;
  return out;
}

}  // namespace memkit::quadrature
