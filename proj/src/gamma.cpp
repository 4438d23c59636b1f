#include "memkit/gamma.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace memkit {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kMaxArgument = 171.6243769563027;  // Gamma(x) overflows beyond this

constexpr auto make_factorials() {
  std::array<double, 171> table{};
  table[0] = 1.0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    table[i] = table[i - 1] * static_cast<double>(i);
  }
  return table;
}

constexpr auto kFactorials = make_factorials();

bool is_integer(double x) { return std::floor(x) == x; }

// Lanczos sum for x >= 0.5.
double lanczos(double x) {
  const double xm1 = x - 1.0;
  double series = kLanczosCoeffs[0];
  for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i) {
    series += kLanczosCoeffs[i] / (xm1 + static_cast<double>(i));
  }
  const double t = xm1 + kLanczosG + 0.5;
  // Split the power so t^(x - 1/2) does not overflow before exp(-t) is applied.
  const double half_power = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * series * (half_power * std::exp(-t)) *
         half_power;
}

}  // namespace

double sin_pi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1], exact
  if (r > 0.5) {
    r = 1.0 - r;
  } else if (r < -0.5) {
    r = -1.0 - r;
  }
  return std::sin(std::numbers::pi * r);
}

double cos_pi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  const double r = std::fabs(x - 2.0 * std::round(0.5 * x));  // r in [0, 1]
  return std::sin(std::numbers::pi * (0.5 - r));
}

double gamma(double x) {
  if (std::isnan(x)) return x;
  if (x > 0.0 && x <= 171.0 && is_integer(x)) {
    return kFactorials[static_cast<std::size_t>(x) - 1];
  }
  if (x <= 0.0 && is_integer(x)) return std::numeric_limits<double>::infinity();
  if (x >= kMaxArgument) return std::numeric_limits<double>::infinity();
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
    const double g = gamma(1.0 - x);
    if (std::isinf(g)) return 0.0;
    return std::numbers::pi / (sin_pi(x) * g);
  }
  return lanczos(x);
}

double rgamma(double x) {
  if (std::isnan(x)) return x;
  if (x <= 0.0 && is_integer(x)) return 0.0;
  if (x < 0.5) {
    // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi; may overflow for very negative x.
    return sin_pi(x) * gamma(1.0 - x) / std::numbers::pi;
  }
  const double g = gamma(x);
  return std::isinf(g) ? 0.0 : 1.0 / g;
}

}  // namespace memkit
