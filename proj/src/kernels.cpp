#include "memkit/kernels.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "memkit/gamma.hpp"
#include "memkit/quadrature.hpp"

namespace memkit {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate(const KernelSpec& spec) {
  std::visit(Overloaded{
                 [](const RieszKernel& k) {
                   if (!(k.rho > 1.0 && k.rho < 2.0)) {
                     std::ostringstream msg;
                     msg << "Riesz kernel exponent rho must lie in (1, 2), got " << k.rho;
                     throw std::invalid_argument(msg.str());
                   }
                 },
                 [](const ExponentialKernel& k) {
                   if (!(k.a > 0.0 && k.a <= 2.0)) {
                     std::ostringstream msg;
                     msg << "exponential kernel decay a must lie in (0, 2], got " << k.a;
                     throw std::invalid_argument(msg.str());
                   }
                 },
             },
             spec);
}

std::string describe(const KernelSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{
                 [&](const RieszKernel& k) { out << "riesz(rho=" << k.rho << ")"; },
                 [&](const ExponentialKernel& k) { out << "exponential(a=" << k.a << ")"; },
             },
             spec);
  return out.str();
}

double kernel_eval(const KernelSpec& spec, double t) {
  return std::visit(Overloaded{
                        [t](const RieszKernel& k) {
                          if (!(t > 0.0)) {
                            throw std::domain_error("Riesz kernel is evaluated only for t > 0");
                          }
                          return std::pow(t, k.rho - 2.0) * rgamma(k.rho - 1.0);
                        },
                        [t](const ExponentialKernel& k) {
                          if (!(t >= 0.0)) {
                            throw std::domain_error("exponential kernel needs t >= 0");
                          }
                          return std::exp(-k.a * t);
                        },
                    },
                    spec);
}

double kernel_integral(const KernelSpec& spec, double t_lo, double t_hi) {
  if (!(t_lo >= 0.0 && t_hi >= t_lo)) {
    throw std::domain_error("kernel_integral needs 0 <= t_lo <= t_hi");
  }
  return std::visit(Overloaded{
                        [=](const RieszKernel& k) {
                          const double p = k.rho - 1.0;
                          return (std::pow(t_hi, p) - std::pow(t_lo, p)) * rgamma(k.rho);
                        },
                        [=](const ExponentialKernel& k) {
                          // e^{-a lo} (1 - e^{-a (hi - lo)}) / a
                          return -std::exp(-k.a * t_lo) * std::expm1(-k.a * (t_hi - t_lo)) / k.a;
                        },
                    },
                    spec);
}

double kernel_first_moment(const KernelSpec& spec, double t_lo, double t_hi) {
  if (!(t_lo >= 0.0 && t_hi >= t_lo)) {
    throw std::domain_error("kernel_first_moment needs 0 <= t_lo <= t_hi");
  }
  return std::visit(Overloaded{
                        [=](const RieszKernel& k) {
                          // t^(rho-1) / Gamma(rho-1) integrates to t^rho / (rho Gamma(rho-1)).
                          return (std::pow(t_hi, k.rho) - std::pow(t_lo, k.rho)) *
                                 rgamma(k.rho - 1.0) / k.rho;
                        },
                        [=](const ExponentialKernel& k) {
                          auto antiderivative = [&](double t) {
                            return -(t / k.a + 1.0 / (k.a * k.a)) * std::exp(-k.a * t);
                          };
                          return antiderivative(t_hi) - antiderivative(t_lo);
                        },
                    },
                    spec);
}

namespace {

constexpr int kMoments = 4;  // powers u^0..u^3
using Moments = std::array<double, kMoments>;

// Weights of u^m in the integral over alpha of psi_p(alpha) psi_q(alpha - u),
// with psi_0(x) = 1 - x and psi_1(x) = x on the unit cell; index [p][q][m].
// Upper: u in [0, 1]; lower: u in [-1, 0].
constexpr double kUpper[2][2][kMoments] = {
    {{1.0 / 3, -1.0 / 2, 0.0, 1.0 / 6}, {1.0 / 6, -1.0 / 2, 1.0 / 2, -1.0 / 6}},
    {{1.0 / 6, 1.0 / 2, -1.0 / 2, -1.0 / 6}, {1.0 / 3, -1.0 / 2, 0.0, 1.0 / 6}}};
constexpr double kLower[2][2][kMoments] = {
    {{1.0 / 3, 1.0 / 2, 0.0, -1.0 / 6}, {1.0 / 6, -1.0 / 2, -1.0 / 2, 1.0 / 6}},
    {{1.0 / 6, 1.0 / 2, 1.0 / 2, 1.0 / 6}, {1.0 / 3, 1.0 / 2, 0.0, -1.0 / 6}}};

// int_{u0}^{u0+1} K(h (n + u)) u^m du, m = 0..3.
Moments local_moments(const KernelSpec& spec, double h, std::size_t n, double u0) {
  Moments out{};
  const double shift = static_cast<double>(n) + u0;  // K argument at the left end, over h
  if (const auto* r = std::get_if<RieszKernel>(&spec); r && shift == 0.0) {
    // Singular left end: int_0^1 v^(rho-2) (v + u0)^m dv, expanded binomially
    // (u0 in {0, -1}, so the coefficients are small integers).
    const double scale = std::pow(h, r->rho - 2.0) * rgamma(r->rho - 1.0);
    for (int m = 0; m < kMoments; ++m) {
      double acc = 0.0;
      double binom = 1.0;
      for (int k = m; k >= 0; --k) {
        // term C(m, k) v^k u0^(m-k)
        acc += binom * std::pow(u0, m - k) / (r->rho - 1.0 + k);
        binom = binom * k / (m - k + 1);
      }
      out[m] = scale * acc;
    }
    return out;
  }
  static const quadrature::Rule rule = quadrature::gauss_legendre(20);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = u0 + 0.5 * (rule.nodes[i] + 1.0);
    const double w = 0.5 * rule.weights[i] * kernel_eval(spec, h * (static_cast<double>(n) + u));
    double power = 1.0;
    for (int m = 0; m < kMoments; ++m) {
      out[m] += w * power;
      power *= u;
    }
  }
  return out;
}

}  // namespace

double positive_definiteness_residual(const KernelSpec& spec, std::span<const double> phi,
                                      double T) {
  validate(spec);
  if (phi.size() < 2) {
    throw std::invalid_argument("positive_definiteness_residual needs at least 2 samples");
  }
  if (!(T > 0.0)) throw std::invalid_argument("positive_definiteness_residual needs T > 0");

  const std::size_t cells = phi.size() - 1;
  const double h = T / static_cast<double>(cells);

  // J[n][p][q] = double integral over a t-cell and an s-cell at lag n of
  // K(t - s) psi_p psi_q, restricted to s < t on the diagonal cell (n = 0).
  std::vector<std::array<std::array<double, 2>, 2>> J(cells);
  for (std::size_t n = 0; n < cells; ++n) {
    const Moments up = local_moments(spec, h, n, 0.0);
    Moments low{};
    if (n > 0) low = local_moments(spec, h, n, -1.0);
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        double acc = 0.0;
        for (int m = 0; m < kMoments; ++m) {
          acc += kUpper[p][q][m] * up[m] + kLower[p][q][m] * low[m];
        }
        J[n][p][q] = acc;
      }
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      const auto& w = J[i - j];
      row += phi[i] * (w[0][0] * phi[j] + w[0][1] * phi[j + 1]) +
             phi[i + 1] * (w[1][0] * phi[j] + w[1][1] * phi[j + 1]);
    }
    total += row;
  }
  return h * h * total;
}

}  // namespace memkit
