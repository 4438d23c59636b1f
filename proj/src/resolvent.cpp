#include "memkit/resolvent.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "memkit/mittag_leffler.hpp"
#include "memkit/parallel.hpp"

namespace memkit {
namespace {

constexpr double kRieszDiffStep = 1e-6;

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream msg;
    msg << "resolvent needs a finite eigenvalue lambda > 0, got " << lambda;
    throw std::invalid_argument(msg.str());
  }
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << "resolvent needs a finite time t >= 0, got " << t;
    throw std::invalid_argument(msg.str());
  }
}

// Damped oscillator data for the exponential kernel.
struct Oscillator {
  double a;
  double lambda;
  double omega;

  Oscillator(double decay, double lam) : a(decay), lambda(lam) {
    const double disc = 4.0 * lambda - a * a;
    if (!(disc > 0.0)) {
      std::ostringstream msg;
      msg << "exponential kernel resolvent needs 4*lambda > a^2 (lambda=" << lambda
          << ", a=" << a << "); the overdamped branch is not implemented";
      throw UnsupportedRegime(msg.str());
    }
    omega = 0.5 * std::sqrt(disc);
  }

  double value(double t) const {
    const double wt = omega * t;
    return std::exp(-0.5 * a * t) * (std::cos(wt) + 0.5 * a / omega * std::sin(wt));
  }
  double derivative(double t) const {
    return -(lambda / omega) * std::exp(-0.5 * a * t) * std::sin(omega * t);
  }
  // From s'' + a s' + lambda s = 0, s(0) = 1, s'(0) = 0.
  double antiderivative(double t) const {
    return (a * (1.0 - value(t)) - derivative(t)) / lambda;
  }
};

template <class Riesz, class Exponential>
double dispatch(const KernelSpec& spec, Riesz&& riesz, Exponential&& exponential) {
  if (const auto* r = std::get_if<RieszKernel>(&spec)) return riesz(*r);
  return exponential(std::get<ExponentialKernel>(spec));
}

}  // namespace

double s_eval(const KernelSpec& spec, double lambda, double t) {
  validate(spec);
  require_lambda(lambda);
  require_time(t);
  return dispatch(
      spec,
      [&](const RieszKernel& k) {
        if (t == 0.0) return 1.0;
        return ml(MLParams{k.rho, 1.0}, -lambda * std::pow(t, k.rho));
      },
      [&](const ExponentialKernel& k) { return Oscillator(k.a, lambda).value(t); });
}

double s_derivative(const KernelSpec& spec, double lambda, double t) {
  validate(spec);
  require_lambda(lambda);
  require_time(t);
  return dispatch(
      spec,
      [&](const RieszKernel& k) {
        if (t == 0.0) return 0.0;
        return -lambda * std::pow(t, k.rho - 1.0) *
               ml(MLParams{k.rho, k.rho}, -lambda * std::pow(t, k.rho));
      },
      [&](const ExponentialKernel& k) { return Oscillator(k.a, lambda).derivative(t); });
}

double s_antiderivative(const KernelSpec& spec, double lambda, double t) {
  validate(spec);
  require_lambda(lambda);
  require_time(t);
  return dispatch(
      spec,
      [&](const RieszKernel& k) {
        if (t == 0.0) return 0.0;
        return t * ml(MLParams{k.rho, 2.0}, -lambda * std::pow(t, k.rho));
      },
      [&](const ExponentialKernel& k) { return Oscillator(k.a, lambda).antiderivative(t); });
}

double s_cell_integral(const KernelSpec& spec, double lambda, double t_lo, double t_hi) {
  require_time(t_lo);
  require_time(t_hi);
  if (!(t_hi > t_lo)) {
    std::ostringstream msg;
    msg << "s_cell_integral needs t_lo < t_hi (got " << t_lo << ", " << t_hi << ")";
    throw std::invalid_argument(msg.str());
  }
  return s_antiderivative(spec, lambda, t_hi) - s_antiderivative(spec, lambda, t_lo);
}

ResolventTable::ResolventTable(const KernelSpec& spec, std::vector<double> eigenvalues, double h,
                               std::size_t M)
    : eigenvalues_(std::move(eigenvalues)), h_(h), steps_(M) {
  validate(spec);
  if (eigenvalues_.empty()) throw std::invalid_argument("resolvent table needs at least one mode");
  for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
    require_lambda(eigenvalues_[k]);
    if (k > 0 && !(eigenvalues_[k] > eigenvalues_[k - 1])) {
      throw std::invalid_argument("resolvent table eigenvalues must be strictly increasing");
    }
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("resolvent table needs h > 0");
  if (M == 0) throw std::invalid_argument("resolvent table needs M >= 1");

  const std::size_t n = modes();
  nodes_.assign((M + 1) * n, 0.0);
  weights_.assign((M + 1) * n, 0.0);
  // Each mode owns a strided column; the layout is independent of threading.
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double lambda = eigenvalues_[k];
      nodes_[k] = 1.0;
      double previous = 0.0;
      for (std::size_t m = 1; m <= M; ++m) {
        const double t = static_cast<double>(m) * h;
        nodes_[m * n + k] = s_eval(spec, lambda, t);
        const double current = s_antiderivative(spec, lambda, t);
        weights_[m * n + k] = current - previous;
        previous = current;
      }
    }
  });
}

ResolventTable build_resolvent_table(const KernelSpec& spec, std::vector<double> eigenvalues,
                                     double h, std::size_t M) {
  return ResolventTable(spec, std::move(eigenvalues), h, M);
}

std::vector<ResidualSample> volterra_residual(const KernelSpec& spec, double lambda,
                                              std::span<const double> times, double step) {
  validate(spec);
  require_lambda(lambda);
  if (!(step > 0.0)) throw std::invalid_argument("volterra_residual needs step > 0");
  double t_max = 0.0;
  for (const double t : times) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("volterra_residual sample times must be positive");
    }
    t_max = std::max(t_max, t);
  }

  // s on a shared grid u_i = i * step covering all sample times.
  const auto cells = static_cast<std::size_t>(std::floor(t_max / step));
  std::vector<double> grid_s(cells + 1);
  parallel_for(cells + 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      grid_s[i] = s_eval(spec, lambda, static_cast<double>(i) * step);
    }
  });

  const bool riesz = std::holds_alternative<RieszKernel>(spec);
  std::vector<ResidualSample> out;
  out.reserve(times.size());
  for (const double t : times) {
    // Full cells [u_j, u_{j+1}] with u_{j+1} <= t, then the partial cell up to t.
    const auto full = std::min(cells, static_cast<std::size_t>(std::floor(t / step)));
    const double s_t = s_eval(spec, lambda, t);
    // Piece over u in [u_lo, u_hi] with s linear from s_lo to s_hi, tau = t - u.
    auto piece = [&](double u_lo, double u_hi, double s_lo, double s_hi) {
      const double width = u_hi - u_lo;
      if (!(width > 0.0)) return 0.0;
      const double tau_lo = std::max(0.0, t - u_hi);
      const double tau_hi = t - u_lo;
      const double m0 = kernel_integral(spec, tau_lo, tau_hi);
      const double m1 = kernel_first_moment(spec, tau_lo, tau_hi);
      return s_lo * m0 + (s_hi - s_lo) * (tau_hi * m0 - m1) / width;
    };
    double conv = 0.0;
    for (std::size_t j = 0; j < full; ++j) {
      conv += piece(static_cast<double>(j) * step, static_cast<double>(j + 1) * step, grid_s[j],
                    grid_s[j + 1]);
    }
    conv += piece(static_cast<double>(full) * step, t, grid_s[full], s_t);

    double ds = 0.0;
    if (riesz) {
      const double d = std::min(kRieszDiffStep, 0.5 * t);
      ds = (s_eval(spec, lambda, t + d) - s_eval(spec, lambda, t - d)) / (2.0 * d);
    } else {
      ds = s_derivative(spec, lambda, t);
    }
    out.push_back({t, std::fabs(ds + lambda * conv)});
  }
  return out;
}

}  // namespace memkit
