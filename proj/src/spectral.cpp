#include "memkit/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "memkit/gamma.hpp"
#include "memkit/quadrature.hpp"

namespace memkit {

double eigenvalue(std::size_t k) {
  if (k == 0) throw std::invalid_argument("eigenvalue index starts at 1");
  const double kk = static_cast<double>(k);
  return kk * kk * std::numbers::pi * std::numbers::pi;
}

std::vector<double> eigenvalues(std::size_t N) {
  std::vector<double> out(N);
  for (std::size_t k = 1; k <= N; ++k) out[k - 1] = eigenvalue(k);
  return out;
}

SpectralBasis::SpectralBasis(std::size_t N) : n_(N) {
  if (N == 0) throw std::invalid_argument("spectral basis needs N >= 1");
  sine_.resize(N * N);
  const std::size_t period = 2 * (N + 1);
  const double denom = static_cast<double>(N + 1);
  for (std::size_t k = 1; k <= N; ++k) {
    for (std::size_t j = 1; j <= N; ++j) {
      // Exact integer reduction of k j / (N+1) modulo 2 before the sine.
      const double arg = static_cast<double>((k * j) % period) / denom;
      sine_[(k - 1) * N + (j - 1)] = std::numbers::sqrt2 * sin_pi(arg);
    }
  }
}

void SpectralBasis::check(std::size_t length) const {
  if (length != n_) {
    std::ostringstream msg;
    msg << "field length " << length << " does not match basis size " << n_;
    throw std::invalid_argument(msg.str());
  }
}

void SpectralBasis::synthesize(std::span<const double> modal, std::span<double> nodal) const {
  check(modal.size());
  check(nodal.size());
  for (std::size_t j = 0; j < n_; ++j) nodal[j] = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    const double c = modal[k];
    const double* row = sine_.data() + k * n_;
    for (std::size_t j = 0; j < n_; ++j) nodal[j] += c * row[j];
  }
}

void SpectralBasis::analyze(std::span<const double> nodal, std::span<double> modal) const {
  check(modal.size());
  check(nodal.size());
  const double w = dx();
  for (std::size_t k = 0; k < n_; ++k) {
    const double* row = sine_.data() + k * n_;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += nodal[j] * row[j];
    modal[k] = w * acc;
  }
}

NodalField SpectralBasis::synthesize(const ModalField& modal) const {
  NodalField out(n_);
  synthesize(modal.span(), out.span());
  return out;
}

ModalField SpectralBasis::analyze(const NodalField& nodal) const {
  ModalField out(n_);
  analyze(nodal.span(), out.span());
  return out;
}

ModalField SpectralBasis::project_initial(const std::function<double(double)>& u0) const {
  static const quadrature::Rule rule = quadrature::gauss_legendre(5);
  const std::size_t panels = 4 * (n_ + 1);
  const double width = 1.0 / static_cast<double>(panels);
  ModalField out(n_);
  for (std::size_t p = 0; p < panels; ++p) {
    const double left = static_cast<double>(p) * width;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = left + 0.5 * width * (rule.nodes[q] + 1.0);
      const double fw = 0.5 * width * rule.weights[q] * u0(x) * std::numbers::sqrt2;
      for (std::size_t k = 0; k < n_; ++k) {
        out[k] += fw * sin_pi(static_cast<double>(k + 1) * x);
      }
    }
  }
  return out;
}

double discrete_l2_error(const NodalField& a, const NodalField& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("discrete_l2_error needs fields of equal length");
  }
  if (a.size() == 0) throw std::invalid_argument("discrete_l2_error needs non-empty fields");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size() + 1));
}

}  // namespace memkit
