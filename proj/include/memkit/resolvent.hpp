#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "memkit/kernels.hpp"

namespace memkit {

/// Raised for the overdamped exponential-kernel branch 4 lambda <= a^2,
/// which has no oscillatory closed form and is not implemented.
class UnsupportedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scalar resolvent s(t) solving s' + lambda (K * s) = 0, s(0) = 1.
///   Riesz:       E_rho(-lambda t^rho)
///   Exponential: e^{-at/2} [cos(w t) + a/(2w) sin(w t)], w = sqrt(4 lambda - a^2) / 2
double s_eval(const KernelSpec& spec, double lambda, double t);

/// ds/dt in closed form.
///   Riesz:       -lambda t^(rho-1) E_{rho,rho}(-lambda t^rho)
///   Exponential: -(lambda/w) e^{-at/2} sin(w t)
double s_derivative(const KernelSpec& spec, double lambda, double t);

/// Antiderivative of s with value 0 at t = 0.
///   Riesz:       t E_{rho,2}(-lambda t^rho)
///   Exponential: (a (1 - s) - s') / lambda
double s_antiderivative(const KernelSpec& spec, double lambda, double t);

/// Exact integral of s over [t_lo, t_hi], 0 <= t_lo < t_hi.
double s_cell_integral(const KernelSpec& spec, double lambda, double t_lo, double t_hi);

/// Node values and cell integrals of s_k on the uniform grid t_m = m h.
///
/// Storage is time-major so that one time level (or lag) across all modes is
/// contiguous, which is the access pattern of the history sums.
class ResolventTable {
 public:
  /// Throws std::invalid_argument for non-increasing or non-positive
  /// eigenvalues, h <= 0 or M == 0; propagates s_eval errors.
  ResolventTable(const KernelSpec& spec, std::vector<double> eigenvalues, double h, std::size_t M);

  std::size_t modes() const { return eigenvalues_.size(); }
  std::size_t steps() const { return steps_; }
  double h() const { return h_; }
  std::span<const double> eigenvalues() const { return eigenvalues_; }

  /// s_k(t_m), k = 0..N-1 (mode k+1), m = 0..M.
  double s(std::size_t k, std::size_t m) const { return nodes_[m * modes() + k]; }
  /// W[k][n] = integral of s_k over [t_{n-1}, t_n], n = 1..M.
  double weight(std::size_t k, std::size_t n) const { return weights_[n * modes() + k]; }

  /// All modes at time level m.
  std::span<const double> s_at(std::size_t m) const {
    return {nodes_.data() + m * modes(), modes()};
  }
  /// All modes at lag n (n = 1..M).
  std::span<const double> weights_at(std::size_t n) const {
    return {weights_.data() + n * modes(), modes()};
  }

 private:
  std::vector<double> eigenvalues_;
  double h_;
  std::size_t steps_;
  std::vector<double> nodes_;    // (M+1) x N
  std::vector<double> weights_;  // (M+1) x N, row 0 unused (zero)
};

ResolventTable build_resolvent_table(const KernelSpec& spec, std::vector<double> eigenvalues,
                                     double h, std::size_t M);

/// One row of the Volterra residual check at time t.
struct ResidualSample {
  double t;
  double residual;  // |s'(t) + lambda int_0^t K(t - u) s(u) du|
};

/// Evaluates the residual of the defining Volterra equation of s at the given
/// times. The convolution is product-integrated on a grid of the given step
/// (s piecewise linear, K integrated exactly); s' comes from a central
/// difference with step 1e-6 for the Riesz kernel and from the closed form
/// for the exponential kernel.
///
/// Throws std::invalid_argument for lambda <= 0, step <= 0 or t outside (0, inf).
std::vector<ResidualSample> volterra_residual(const KernelSpec& spec, double lambda,
                                              std::span<const double> times, double step);

}  // namespace memkit
