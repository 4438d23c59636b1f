#include "problem.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace memkit::cli {
namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int digits = 1; digits <= 17; ++digits) {
    char trial[32];
    std::snprintf(trial, sizeof trial, "%.*g", digits, v);
    if (std::strtod(trial, nullptr) == v) return trial;
  }
  return buf;
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "trapezoidal") return Scheme::trapezoidal;
  if (name == "euler") return Scheme::euler;
  throw ConfigError("unknown scheme '" + name + "' (expected trapezoidal or euler)");
}

std::string scheme_name(Scheme scheme) {
  return scheme == Scheme::trapezoidal ? "trapezoidal" : "euler";
}

KernelSpec make_kernel(const std::string& name, double rho, double decay) {
  KernelSpec spec;
  if (name == "riesz") {
    spec = RieszKernel{rho};
  } else if (name == "exponential") {
    spec = ExponentialKernel{decay};
  } else {
    throw ConfigError("unknown kernel '" + name + "' (expected riesz or exponential)");
  }
  try {
    memkit::validate(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(e.what()) +
                      (name == "riesz" ? "; set --rho in (1, 2)" : "; set --decay in (0, 2]"));
  }
  return spec;
}

std::string kernel_label(const KernelSpec& spec) {
  if (const auto* r = std::get_if<RieszKernel>(&spec)) return "riesz_rho" + short_number(r->rho);
  return "exponential_a" + short_number(std::get<ExponentialKernel>(spec).a);
}

void validate(const Problem& problem) {
  memkit::validate(problem.solver);
  if (problem.f != "sin" && problem.f != "zero" && problem.f != "const" && problem.f != "cubic") {
    throw ConfigError("unknown nonlinearity '" + problem.f +
                      "' (expected sin, zero, const or cubic)");
  }
  if (problem.u0 == "mode") {
    if (problem.u0_mode < 1 || problem.u0_mode > problem.solver.N) {
      std::ostringstream msg;
      msg << "u0 mode " << problem.u0_mode << " outside 1.." << problem.solver.N;
      throw ConfigError(msg.str());
    }
  } else if (problem.u0 == "coeffs") {
    if (problem.u0_coeffs.empty() || problem.u0_coeffs.size() > problem.solver.N) {
      throw ConfigError("u0 coefficients must be a non-empty list of at most N values");
    }
  } else if (problem.u0 != "poly4x1mx") {
    throw ConfigError("unknown initial condition '" + problem.u0 +
                      "' (expected poly4x1mx, mode or coeffs)");
  }
}

Nonlinearity make_nonlinearity(const Problem& problem) {
  if (problem.f == "sin") return sine_nonlinearity();
  if (problem.f == "zero") return zero_nonlinearity();
  if (problem.f == "const") return constant_nonlinearity(problem.f_const);
  if (problem.f == "cubic") return cubic_nonlinearity();
  throw ConfigError("unknown nonlinearity '" + problem.f + "'");
}

ModalField make_initial(const Problem& problem, const SpectralBasis& basis) {
  if (problem.u0 == "poly4x1mx") {
    return basis.project_initial([](double x) { return 4.0 * x * (1.0 - x); });
  }
  ModalField out(basis.size());
  if (problem.u0 == "mode") {
    out[problem.u0_mode - 1] = 1.0;
  } else {
    for (std::size_t k = 0; k < problem.u0_coeffs.size(); ++k) out[k] = problem.u0_coeffs[k];
  }
  return out;
}

Trajectory solve(const Problem& problem) {
  validate(problem);
  const Nonlinearity f = make_nonlinearity(problem);
  if (problem.scheme == Scheme::trapezoidal) check_contraction(problem.solver, f.lipschitz);
  return solve(problem, make_table(problem.solver));
}

Trajectory solve(const Problem& problem, const ResolventTable& table) {
  validate(problem);
  const SpectralBasis basis(problem.solver.N);
  const ModalField u0 = make_initial(problem, basis);
  const Nonlinearity f = make_nonlinearity(problem);
  if (problem.scheme == Scheme::trapezoidal) {
    return run_trapezoidal(problem.solver, f, u0, table);
  }
  return run_exponential_euler(problem.solver, f, u0, table);
}

nlohmann::ordered_json to_json(const Problem& problem) {
  nlohmann::ordered_json kernel;
  if (const auto* r = std::get_if<RieszKernel>(&problem.solver.kernel)) {
    kernel = {{"type", "riesz"}, {"rho", r->rho}};
  } else {
    kernel = {{"type", "exponential"}, {"decay", std::get<ExponentialKernel>(problem.solver.kernel).a}};
  }
  nlohmann::ordered_json out = {
      {"kernel", kernel},
      {"N", problem.solver.N},
      {"T", problem.solver.T},
      {"M", problem.solver.M},
      {"fp_tol", problem.solver.fp_tol},
      {"fp_max_iters", problem.solver.fp_max_iters},
      {"scheme", scheme_name(problem.scheme)},
      {"f", problem.f},
  };
  if (problem.f == "const") out["f_const"] = problem.f_const;
  out["u0"] = problem.u0;
  if (problem.u0 == "mode") out["u0_mode"] = problem.u0_mode;
  if (problem.u0 == "coeffs") out["u0_coeffs"] = problem.u0_coeffs;
  return out;
}

Problem benchmark_problem(const KernelSpec& kernel, std::size_t M) {
  Problem p;
  p.solver.kernel = kernel;
  p.solver.N = 100;
  p.solver.T = 1.0;
  p.solver.M = M;
  p.f = "sin";
  p.u0 = "poly4x1mx";
  return p;
}

std::vector<KernelSpec> benchmark_kernels() {
  return {ExponentialKernel{2.0}, RieszKernel{1.25}, RieszKernel{1.75}};
}

}  // namespace memkit::cli
