#pragma once

#include <span>
#include <string>
#include <variant>

namespace memkit {

/// K(t) = t^(rho-2) / Gamma(rho-1), 1 < rho < 2. Equivalently the fractional
/// integral kernel t^(beta-1)/Gamma(beta) with beta = rho - 1.
struct RieszKernel {
  double rho = 1.5;
};

/// K(t) = exp(-a t), 0 < a <= 2.
struct ExponentialKernel {
  double a = 2.0;
};

using KernelSpec = std::variant<RieszKernel, ExponentialKernel>;

/// Throws std::invalid_argument when the kernel parameter is out of range.
void validate(const KernelSpec& spec);

/// "riesz(rho=1.5)" style label, stable across runs (used in artifacts).
std::string describe(const KernelSpec& spec);

/// K(t). Riesz needs t > 0, exponential t >= 0; otherwise std::domain_error.
double kernel_eval(const KernelSpec& spec, double t);

/// Exact integral of K over [t_lo, t_hi], 0 <= t_lo <= t_hi. The Riesz
/// singularity at 0 is integrated through its antiderivative, never sampled.
double kernel_integral(const KernelSpec& spec, double t_lo, double t_hi);

/// Exact first moment: integral of t K(t) over [t_lo, t_hi].
double kernel_first_moment(const KernelSpec& spec, double t_lo, double t_hi);

/// Discrete version of the quadratic form
///   Q(phi) = int_0^T phi(t) int_0^t K(t-s) phi(s) ds dt
/// for phi sampled on a uniform grid over [0, T], evaluated exactly for the
/// piecewise-linear interpolant of phi (cell-pair moments of K; the singular
/// Riesz cells in closed form). Being an exact quadratic form of a function,
/// it stays >= -1e-8 * max|phi|^2 * T^2 for a positive definite kernel.
///
/// Throws std::invalid_argument for fewer than 2 samples or T <= 0.
double positive_definiteness_residual(const KernelSpec& spec, std::span<const double> phi,
                                      double T);

}  // namespace memkit
