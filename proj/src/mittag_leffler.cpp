#include "memkit/mittag_leffler.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "memkit/gamma.hpp"
#include "memkit/quadrature.hpp"

namespace memkit {
namespace {

constexpr double kSeriesRadius = 1.0;
constexpr double kCircleRadius = 0.5;
constexpr int kMaxSeriesTerms = 200;
constexpr double kTermTol = 1e-17;
constexpr double kQuadTol = 1e-15;

bool is_integer(double v) { return std::floor(v) == v; }

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double taylor(double a, double b, double z) {
  CompensatedSum sum;
  double zk = 1.0;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double term = zk * rgamma(a * k + b);
    sum.add(term);
    if (k > 0 && std::fabs(term) <= kTermTol * std::fabs(sum.value())) break;
    zk *= z;
  }
  return sum.value();
}

// Contribution of the conjugate poles s = x^(1/a) exp(+-i pi/a), present for
// 1 < a <= 2: (2/a) Re[exp(s) s^(1-b)].
double pole_residues(double a, double b, double x) {
  if (a <= 1.0) return 0.0;
  const double inv_a = 1.0 / a;
  const double radius = std::pow(x, inv_a);
  const double re = radius * cos_pi(inv_a);
  const double im = radius * sin_pi(inv_a);
  const double phase = im + (1.0 - b) * std::numbers::pi * inv_a;
  return 2.0 * inv_a * std::pow(radius, 1.0 - b) * std::exp(re) * std::cos(phase);
}

// -sum_{k>=1} z^(-k) / Gamma(b - a k) with z = -x, optimally truncated.
// Truncation is judged on the envelope Gamma(1 - b + a k) / (pi x^k), which
// bounds |term| without the oscillating sin(pi (b - a k)) factor that can make
// a single term spuriously small. Returns nullopt when the envelope does not
// reach the tolerance before it starts to grow.
std::optional<double> algebraic_asymptotic(double a, double b, double x) {
  const bool terminates = is_integer(a) && is_integer(b);
  const double log_x = std::log(x);
  CompensatedSum sum;
  double previous_envelope = std::numeric_limits<double>::infinity();
  double zinv_k = 1.0;
  const double zinv = -1.0 / x;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    zinv_k *= zinv;
    const double arg = b - a * k;
    if (terminates && arg <= 0.0) return sum.value();
    const double term = -zinv_k * rgamma(arg);
    if (!std::isfinite(term)) return std::nullopt;
    sum.add(term);
    const double reflected = 1.0 - arg;
    if (reflected <= 0.0) continue;  // still in the region where 1/Gamma is O(1)
    const double envelope = std::exp(std::lgamma(reflected) - k * log_x) / std::numbers::pi;
    if (envelope > previous_envelope) return std::nullopt;
    previous_envelope = envelope;
    if (envelope <= kTermTol * std::fabs(sum.value())) return sum.value();
  }
  return std::nullopt;
}

// (1/pi) Integral over the circle |s| = eps of exp(s) s^(a-b+1) / (s^a + x),
// using conjugate symmetry to integrate over [0, pi] only.
double origin_circle(double a, double b, double x) {
  if (is_integer(a) && is_integer(b) && b <= a) return 0.0;  // integrand analytic at 0
  static const quadrature::Rule rule = quadrature::gauss_legendre(48);
  const double eps = kCircleRadius;
  const double eps_p = std::pow(eps, a - b + 1.0);
  const double eps_a = std::pow(eps, a);
  CompensatedSum sum;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double phi = 0.5 * std::numbers::pi * (rule.nodes[i] + 1.0);
    const std::complex<double> s = std::polar(eps, phi);
    const std::complex<double> num = std::exp(s) * std::polar(eps_p, (a - b + 1.0) * phi);
    const std::complex<double> den = std::polar(eps_a, a * phi) + x;
    sum.add(rule.weights[i] * (num / den).real());
  }
  return 0.5 * sum.value();  // (1/pi) * (pi/2) * sum
}

// (1/pi) Integral_eps^inf exp(-r) r^(a-b) [r^a sin(pi b) + x sin(pi (b-a))]
//        / (r^2a + 2 x r^a cos(pi a) + x^2) dr
double branch_cut(double a, double b, double x) {
  const double sb = sin_pi(b);
  const double sba = sin_pi(b - a);
  if (sb == 0.0 && sba == 0.0) return 0.0;
  const double ca = cos_pi(a);
  const double sa = sin_pi(a);
  auto integrand = [=](double r) {
    const double ra = std::pow(r, a);
    const double shifted = ra + x * ca;
    const double den = shifted * shifted + (x * sa) * (x * sa);
    return std::exp(-r) * std::pow(r, a - b) * (ra * sb + x * sba) / den;
  };
  const double eps = kCircleRadius;
  double total = 0.0;
  // Near-singular peak of the denominator at r^a = -x cos(pi a).
  const double peak = ca < 0.0 ? std::pow(-x * ca, 1.0 / a) : 0.0;
  if (peak > eps && peak < 80.0) {
    total += quadrature::tanh_sinh(integrand, eps, peak, kQuadTol).value;
    total += quadrature::exp_decay(integrand, peak, kQuadTol).value;
  } else {
    total += quadrature::exp_decay(integrand, eps, kQuadTol).value;
  }
  return total / std::numbers::pi;
}

// a == 1, x > kSeriesRadius.
double unit_order(double b, double x) {
  if (b == 1.0) return std::exp(-x);
  if (b < 1.0) return rgamma(b) - x * unit_order(b + 1.0, x);
  // E_{1,b}(-x) = 1/Gamma(b-1) Integral_0^1 exp(-x v) (1-v)^(b-2) dv, split at
  // 1/2 so both pieces have their delicate endpoint at the left.
  auto near_zero = [=](double v) { return std::exp(-x * v) * std::pow(1.0 - v, b - 2.0); };
  auto near_one = [=](double u) { return std::exp(-x * (1.0 - u)) * std::pow(u, b - 2.0); };
  const double left = quadrature::tanh_sinh(near_zero, 0.0, 0.5, kQuadTol).value;
  const double right = quadrature::tanh_sinh(near_one, 0.0, 0.5, kQuadTol).value;
  return rgamma(b - 1.0) * (left + right);
}

}  // namespace

void validate(const MLParams& params) {
  if (!(std::isfinite(params.a) && params.a > 0.0 && params.a <= 2.0) ||
      !(std::isfinite(params.b) && params.b > 0.0)) {
    std::ostringstream msg;
    msg << "Mittag-Leffler parameters must satisfy 0 < a <= 2 and b > 0 (got a=" << params.a
        << ", b=" << params.b << ")";
    throw std::invalid_argument(msg.str());
  }
}

double ml(const MLParams& params, double z) {
  validate(params);
  if (!(z <= 0.0)) {
    std::ostringstream msg;
    msg << "Mittag-Leffler evaluation is implemented for real z <= 0 only (got z=" << z << ")";
    throw std::domain_error(msg.str());
  }
  const double a = params.a;
  const double b = params.b;
  if (z == 0.0) return rgamma(b);
  const double x = -z;
  if (x <= kSeriesRadius) return taylor(a, b, z);
  if (a == 1.0) return unit_order(b, x);

  if (std::pow(x, 1.0 / a) >= 20.0) {
    if (auto tail = algebraic_asymptotic(a, b, x)) {
      return pole_residues(a, b, x) + *tail;
    }
  }
  return pole_residues(a, b, x) + origin_circle(a, b, x) + branch_cut(a, b, x);
}

double ml_e1(double a, double z) { return ml(MLParams{a, 1.0}, z); }

}  // namespace memkit
