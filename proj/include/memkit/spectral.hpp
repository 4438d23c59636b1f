#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace memkit {

/// Coordinates (v, e_k), k = 1..N, against e_k(x) = sqrt(2) sin(k pi x).
class ModalField {
 public:
  ModalField() = default;
  explicit ModalField(std::size_t n) : coeffs_(n, 0.0) {}
  explicit ModalField(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  std::size_t size() const { return coeffs_.size(); }
  double& operator[](std::size_t k) { return coeffs_[k]; }
  double operator[](std::size_t k) const { return coeffs_[k]; }
  std::span<double> span() { return coeffs_; }
  std::span<const double> span() const { return coeffs_; }
  const std::vector<double>& vector() const { return coeffs_; }

  friend bool operator==(const ModalField&, const ModalField&) = default;

 private:
  std::vector<double> coeffs_;
};

/// Values at the interior nodes x_j = j / (N+1), j = 1..N. The Dirichlet
/// boundary values are zero and not stored.
class NodalField {
 public:
  NodalField() = default;
  explicit NodalField(std::size_t n) : values_(n, 0.0) {}
  explicit NodalField(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t j) { return values_[j]; }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  friend bool operator==(const NodalField&, const NodalField&) = default;

 private:
  std::vector<double> values_;
};

/// lambda_k = k^2 pi^2, k >= 1. Throws std::invalid_argument for k == 0.
double eigenvalue(std::size_t k);

/// First N eigenvalues, lambda_1..lambda_N.
std::vector<double> eigenvalues(std::size_t N);

/// Dense sine basis of A = -d^2/dx^2 on (0, 1) with Dirichlet conditions.
/// The N x N matrix sqrt(2) sin(k pi x_j) is precomputed and immutable.
class SpectralBasis {
 public:
  /// Throws std::invalid_argument for N == 0.
  explicit SpectralBasis(std::size_t N);

  std::size_t size() const { return n_; }
  double dx() const { return 1.0 / static_cast<double>(n_ + 1); }
  double node(std::size_t j) const { return static_cast<double>(j + 1) * dx(); }

  /// values_j = sum_k c_k sqrt(2) sin(k pi x_j).
  NodalField synthesize(const ModalField& modal) const;
  /// c_k = dx sum_j values_j sqrt(2) sin(k pi x_j); exact inverse of synthesize.
  ModalField analyze(const NodalField& nodal) const;

  /// Span versions writing into caller storage (no allocation).
  void synthesize(std::span<const double> modal, std::span<double> nodal) const;
  void analyze(std::span<const double> nodal, std::span<double> modal) const;

  /// (u0, e_k) by composite Gauss-Legendre: 4 (N+1) panels of 5 points.
  ModalField project_initial(const std::function<double(double)>& u0) const;

 private:
  void check(std::size_t length) const;

  std::size_t n_;
  std::vector<double> sine_;  // sine_[k * n + j] = sqrt(2) sin((k+1) pi x_{j+1})
};

/// (dx sum_j (a_j - b_j)^2)^(1/2), dx = 1/(N+1). Throws std::invalid_argument
/// on length mismatch or empty fields.
double discrete_l2_error(const NodalField& a, const NodalField& b);

}  // namespace memkit
