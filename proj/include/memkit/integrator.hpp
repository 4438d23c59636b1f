#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "memkit/kernels.hpp"
#include "memkit/resolvent.hpp"
#include "memkit/spectral.hpp"

namespace memkit {

/// Invalid solver or problem configuration (caught before any work is done).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure during time stepping.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The per-step fixed-point iteration hit its iteration cap.
class FixedPointDivergence : public SolverError {
 public:
  FixedPointDivergence(std::size_t step, std::size_t iterations, double residual);
  std::size_t step() const { return step_; }
  std::size_t iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  std::size_t step_;
  std::size_t iterations_;
  double residual_;
};

struct SolverConfig {
  KernelSpec kernel = ExponentialKernel{2.0};
  std::size_t N = 100;
  double T = 1.0;
  std::size_t M = 64;
  double fp_tol = 1e-12;  // on the modal sup-norm
  std::size_t fp_max_iters = 50;

  double h() const { return T / static_cast<double>(M); }
};

/// Throws ConfigError unless M, N >= 1, T > 0, fp_tol > 0, fp_max_iters >= 1
/// and the kernel parameters are valid.
void validate(const SolverConfig& config);

/// Contraction guard (h/2) * lipschitz < 0.9; throws ConfigError otherwise.
void check_contraction(const SolverConfig& config, double lipschitz);

/// Pointwise nonlinearity f(u) with a Lipschitz estimate for the guard.
struct Nonlinearity {
  std::string name;
  std::function<double(double)> f;
  double lipschitz = 0.0;
  bool vanishes = false;  // f == 0 identically
};

Nonlinearity sine_nonlinearity();                // sin u, L = 1
Nonlinearity zero_nonlinearity();                // 0, L = 0
Nonlinearity constant_nonlinearity(double c);    // c, L = 0
Nonlinearity cubic_nonlinearity();               // u - u^3, L = 2 (|u| <= 1)

struct StepDiagnostics {
  std::size_t iterations = 0;  // 0 for explicit steps
  double residual = 0.0;       // fixed-point residual of the accepted state
};

struct Trajectory {
  std::vector<double> times;              // t_m = m h, m = 0..M
  std::vector<ModalField> states;         // U_m; states[0] = projected u0
  std::vector<StepDiagnostics> steps;     // entry m-1 describes step m

  const ModalField& final_state() const { return states.back(); }
};

/// Maps modal U to the modal coefficients of f applied at the nodes.
using ProjectedMap = std::function<void(std::span<const double> U, std::span<double> G)>;

/// analyze(f(synthesize(U))) on the given basis.
ProjectedMap projected_nonlinearity(const SpectralBasis& basis, const Nonlinearity& f);

struct FixedPointResult {
  ModalField U;
  ModalField G;  // P_N f(U) at the accepted U
  std::size_t iterations = 0;
  double residual = 0.0;  // sup_k |U - known - w1/2 G|
};

/// Solves U = known + (1/2) w1 .* Pf(U) by fixed-point iteration from U_prev.
///
/// Each iteration forms U' = known + (1/2) w1 .* Pf(U) and evaluates Pf(U');
/// the sup-norm of (1/2) w1 .* (Pf(U') - Pf(U)) is both the size of the next
/// update and the exact residual of U', and U' is accepted once it is
/// <= fp_tol. The returned G is reused by the caller, so acceptance costs no
/// extra evaluation. g_prev, when given, is Pf(U_prev).
///
/// Throws FixedPointDivergence (tagged with step) after fp_max_iters.
FixedPointResult solve_step_fixed_point(std::span<const double> known, std::span<const double> w1,
                                        const ProjectedMap& pf, const ModalField& U_prev,
                                        double fp_tol, std::size_t fp_max_iters,
                                        const ModalField* g_prev = nullptr,
                                        std::size_t step = 0);

/// Implicit exponential trapezoidal rule, mode-wise
///   U_m = s(t_m) u0 + 1/2 sum_{j<m} W[m-j] (G_j + G_{j+1}),  G_i = Pf(U_i).
/// Checks the contraction guard first.
Trajectory run_trapezoidal(const SolverConfig& config, const Nonlinearity& f,
                           const ModalField& u0_modal);
Trajectory run_trapezoidal(const SolverConfig& config, const Nonlinearity& f,
                           const ModalField& u0_modal, const ResolventTable& table);

/// Explicit exponential Euler, U_m = s(t_m) u0 + sum_{j<m} W[m-j] G_j.
Trajectory run_exponential_euler(const SolverConfig& config, const Nonlinearity& f,
                                 const ModalField& u0_modal);
Trajectory run_exponential_euler(const SolverConfig& config, const Nonlinearity& f,
                                 const ModalField& u0_modal, const ResolventTable& table);

/// Table for (config.kernel, lambda_1..lambda_N, h, M).
ResolventTable make_table(const SolverConfig& config);

}  // namespace memkit
