#include "memkit/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "memkit/parallel.hpp"

namespace memkit {
namespace {

constexpr double kContractionLimit = 0.9;
// History sums beyond this many terms use compensated accumulation.
constexpr std::size_t kCompensationThreshold = 1000;
constexpr std::size_t kMinModesPerChunk = 16;

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::fabs(x));
  return m;
}

void check_table(const SolverConfig& config, const ResolventTable& table) {
  if (table.modes() != config.N || table.steps() != config.M ||
      std::fabs(table.h() - config.h()) > 1e-15 * config.h()) {
    throw ConfigError("resolvent table does not match the solver configuration");
  }
}

// out[k] = sum_{j < count} weights_at(lag0 - j)[k] * history[j][k]
// in ascending j for every mode; compensated when count is large. Each mode
// is an independent lane, so the chunking never changes the result.
void history_sum(const ResolventTable& table, std::size_t lag0, std::span<const double> history,
                 std::size_t count, std::span<double> out) {
  const std::size_t n = table.modes();
  const bool compensated = count > kCompensationThreshold;
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        const std::size_t width = end - begin;
        std::vector<double> sum(width, 0.0);
        std::vector<double> comp(width, 0.0);
        for (std::size_t j = 0; j < count; ++j) {
          const double* w = table.weights_at(lag0 - j).data() + begin;
          const double* g = history.data() + j * n + begin;
          if (compensated) {
            for (std::size_t i = 0; i < width; ++i) {
              const double y = w[i] * g[i] - comp[i];
              const double t = sum[i] + y;
              comp[i] = (t - sum[i]) - y;
              sum[i] = t;
            }
          } else {
            for (std::size_t i = 0; i < width; ++i) sum[i] += w[i] * g[i];
          }
        }
        for (std::size_t i = 0; i < width; ++i) out[begin + i] = sum[i];
      },
      kMinModesPerChunk);
}

// pf refers to basis, so it is bound only once the Setup has its final address.
struct Setup {
  SpectralBasis basis;
  ProjectedMap pf;
  Trajectory trajectory;
};

Setup prepare(const SolverConfig& config, const Nonlinearity& f, const ModalField& u0_modal,
              const ResolventTable& table) {
  validate(config);
  check_table(config, table);
  if (u0_modal.size() != config.N) {
    throw ConfigError("initial modal field length does not match N");
  }
  if (!f.f) throw ConfigError("nonlinearity has no function");
  Setup setup{SpectralBasis(config.N), {}, {}};
  auto& traj = setup.trajectory;
  traj.times.resize(config.M + 1);
  for (std::size_t m = 0; m <= config.M; ++m) traj.times[m] = static_cast<double>(m) * config.h();
  traj.states.reserve(config.M + 1);
  traj.states.push_back(u0_modal);
  traj.steps.reserve(config.M);
  return setup;
}

}  // namespace

FixedPointDivergence::FixedPointDivergence(std::size_t step, std::size_t iterations,
                                           double residual)
    : SolverError([&] {
        std::ostringstream msg;
        msg << "fixed-point iteration did not converge at step " << step << " after "
            << iterations << " iterations (last residual " << residual << ")";
        return msg.str();
      }()),
      step_(step),
      iterations_(iterations),
      residual_(residual) {}

void validate(const SolverConfig& config) {
  try {
    validate(config.kernel);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (config.N == 0) throw ConfigError("N must be at least 1");
  if (config.M == 0) throw ConfigError("M must be at least 1");
  if (!(config.T > 0.0) || !std::isfinite(config.T)) throw ConfigError("T must be positive");
  if (!(config.fp_tol > 0.0)) throw ConfigError("fp_tol must be positive");
  if (config.fp_max_iters == 0) throw ConfigError("fp_max_iters must be at least 1");
}

void check_contraction(const SolverConfig& config, double lipschitz) {
  const double factor = 0.5 * config.h() * lipschitz;
  if (!(factor < kContractionLimit)) {
    std::ostringstream msg;
    msg << "step too large for the fixed-point iteration: (h/2)*L = " << factor
        << " must be below " << kContractionLimit << " (h=" << config.h() << ", L=" << lipschitz
        << "); increase M";
    throw ConfigError(msg.str());
  }
}

Nonlinearity sine_nonlinearity() {
  return {"sin", [](double u) { return std::sin(u); }, 1.0, false};
}

Nonlinearity zero_nonlinearity() {
  return {"zero", [](double) { return 0.0; }, 0.0, true};
}

Nonlinearity constant_nonlinearity(double c) {
  return {"const", [c](double) { return c; }, 0.0, c == 0.0};
}

Nonlinearity cubic_nonlinearity() {
  return {"cubic", [](double u) { return u - u * u * u; }, 2.0, false};
}

ProjectedMap projected_nonlinearity(const SpectralBasis& basis, const Nonlinearity& f) {
  auto scratch = std::make_shared<std::vector<double>>(basis.size());
  return [&basis, fn = f.f, zero = f.vanishes, scratch](std::span<const double> U,
                                                        std::span<double> G) {
    if (zero) {
      std::fill(G.begin(), G.end(), 0.0);
      return;
    }
    std::span<double> nodal(*scratch);
    basis.synthesize(U, nodal);
    for (double& v : nodal) v = fn(v);
    basis.analyze(nodal, G);
  };
}

FixedPointResult solve_step_fixed_point(std::span<const double> known, std::span<const double> w1,
                                        const ProjectedMap& pf, const ModalField& U_prev,
                                        double fp_tol, std::size_t fp_max_iters,
                                        const ModalField* g_prev, std::size_t step) {
  const std::size_t n = known.size();
  if (w1.size() != n || U_prev.size() != n) {
    throw std::invalid_argument("fixed-point inputs must have equal length");
  }
  ModalField g(n);
  if (g_prev) {
    g = *g_prev;
  } else {
    pf(U_prev.span(), g.span());
  }
  ModalField u(n);
  ModalField g_next(n);
  std::vector<double> delta(n);
  double residual = 0.0;
  for (std::size_t it = 1; it <= fp_max_iters; ++it) {
    for (std::size_t k = 0; k < n; ++k) u[k] = known[k] + 0.5 * w1[k] * g[k];
    pf(u.span(), g_next.span());
    for (std::size_t k = 0; k < n; ++k) delta[k] = 0.5 * w1[k] * (g_next[k] - g[k]);
    residual = sup_norm(delta);
    if (residual <= fp_tol) return {std::move(u), std::move(g_next), it, residual};
    std::swap(g, g_next);
  }
  throw FixedPointDivergence(step, fp_max_iters, residual);
}

ResolventTable make_table(const SolverConfig& config) {
  validate(config);
  return build_resolvent_table(config.kernel, eigenvalues(config.N), config.h(), config.M);
}

Trajectory run_trapezoidal(const SolverConfig& config, const Nonlinearity& f,
                           const ModalField& u0_modal) {
  validate(config);
  check_contraction(config, f.lipschitz);
  return run_trapezoidal(config, f, u0_modal, make_table(config));
}

Trajectory run_trapezoidal(const SolverConfig& config, const Nonlinearity& f,
                           const ModalField& u0_modal, const ResolventTable& table) {
  Setup setup = prepare(config, f, u0_modal, table);
  setup.pf = projected_nonlinearity(setup.basis, f);
  check_contraction(config, f.lipschitz);
  auto& traj = setup.trajectory;
  const std::size_t n = config.N;
  const std::size_t M = config.M;

  // pairs[j] = G_j + G_{j+1}, j = 0..M-2.
  std::vector<double> pairs(M * n, 0.0);
  ModalField g_prev(n);
  setup.pf(u0_modal.span(), g_prev.span());
  std::vector<double> known(n);
  const auto w1 = table.weights_at(1);

  for (std::size_t m = 1; m <= M; ++m) {
    // known = s(t_m) u0 + 1/2 (sum_{j<=m-2} W[m-j] P_j + W[1] G_{m-1})
    history_sum(table, m, pairs, m - 1, known);
    const auto s = table.s_at(m);
    for (std::size_t k = 0; k < n; ++k) {
      known[k] = s[k] * u0_modal[k] + 0.5 * (known[k] + w1[k] * g_prev[k]);
    }
    FixedPointResult r = solve_step_fixed_point(known, w1, setup.pf, traj.states.back(),
                                                config.fp_tol, config.fp_max_iters, &g_prev, m);
    if (m < M) {
      double* p = pairs.data() + (m - 1) * n;
      for (std::size_t k = 0; k < n; ++k) p[k] = g_prev[k] + r.G[k];
    }
    traj.steps.push_back({r.iterations, r.residual});
    traj.states.push_back(std::move(r.U));
    g_prev = std::move(r.G);
  }
  return std::move(traj);
}

Trajectory run_exponential_euler(const SolverConfig& config, const Nonlinearity& f,
                                 const ModalField& u0_modal) {
  validate(config);
  return run_exponential_euler(config, f, u0_modal, make_table(config));
}

Trajectory run_exponential_euler(const SolverConfig& config, const Nonlinearity& f,
                                 const ModalField& u0_modal, const ResolventTable& table) {
  Setup setup = prepare(config, f, u0_modal, table);
  setup.pf = projected_nonlinearity(setup.basis, f);
  auto& traj = setup.trajectory;
  const std::size_t n = config.N;
  const std::size_t M = config.M;

  std::vector<double> history(M * n, 0.0);  // G_j, j = 0..M-1
  setup.pf(u0_modal.span(), std::span<double>(history.data(), n));
  std::vector<double> sum(n);
  for (std::size_t m = 1; m <= M; ++m) {
    history_sum(table, m, history, m, sum);
    const auto s = table.s_at(m);
    ModalField u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = s[k] * u0_modal[k] + sum[k];
    if (m < M) setup.pf(u.span(), std::span<double>(history.data() + m * n, n));
    traj.steps.push_back({0, 0.0});
    traj.states.push_back(std::move(u));
  }
  return std::move(traj);
}

}  // namespace memkit
