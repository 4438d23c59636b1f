#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "memkit/integrator.hpp"
#include "memkit/spectral.hpp"

namespace memkit::cli {

enum class Scheme { trapezoidal, euler };

/// Everything needed for one solve: solver settings plus the choice of
/// nonlinearity, initial data and time stepper.
struct Problem {
  SolverConfig solver;
  std::string f = "sin";  // sin | zero | const | cubic
  double f_const = 0.0;
  std::string u0 = "poly4x1mx";  // poly4x1mx | mode | coeffs
  std::size_t u0_mode = 1;
  std::vector<double> u0_coeffs;
  Scheme scheme = Scheme::trapezoidal;
};

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme scheme);

/// Kernel from its CLI name and parameters; throws ConfigError for unknown names.
KernelSpec make_kernel(const std::string& name, double rho, double decay);

/// File-name friendly label, e.g. "riesz_rho1.25" or "exponential_a2".
std::string kernel_label(const KernelSpec& spec);

/// Throws ConfigError for unknown choices or out-of-range values.
void validate(const Problem& problem);

Nonlinearity make_nonlinearity(const Problem& problem);
ModalField make_initial(const Problem& problem, const SpectralBasis& basis);

/// Runs the selected scheme (the trapezoidal rule checks the contraction guard).
Trajectory solve(const Problem& problem);
Trajectory solve(const Problem& problem, const ResolventTable& table);

nlohmann::ordered_json to_json(const Problem& problem);

/// The problem of the headline experiments: N = 100, T = 1, f = sin u,
/// u0 = 4x(1-x), with the given kernel and step count.
Problem benchmark_problem(const KernelSpec& kernel, std::size_t M);

/// Exponential a = 2, Riesz rho = 1.25 and Riesz rho = 1.75.
std::vector<KernelSpec> benchmark_kernels();

}  // namespace memkit::cli
