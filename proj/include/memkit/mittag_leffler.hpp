#pragma once

namespace memkit {

/// Parameters of the two-parameter Mittag-Leffler function
/// E_{a,b}(z) = sum_k z^k / Gamma(a k + b). Supported: 0 < a <= 2, b > 0.
struct MLParams {
  double a = 1.0;
  double b = 1.0;
};

/// Throws std::invalid_argument unless 0 < a <= 2 and b > 0 (both finite).
void validate(const MLParams& params);

/// E_{a,b}(z) for real z <= 0.
///
/// Evaluation regimes:
///  - |z| <= 1: Taylor series with compensated summation.
///  - large |z|: algebraic asymptotic series, optimally truncated, plus the
///    residues of the two complex poles of s^(a-b) / (s^a - z) when a > 1.
///    Used only when the smallest retained term is below 1e-17 of the sum.
///  - otherwise: inverse Laplace transform on a Hankel contour collapsed onto
///    the negative real axis with a circle of radius 1/2 around the origin,
///    plus the same pole residues. The cut integrand has a fixed sign for
///    integer b, so there is no cancellation.
///  - a == 1 is treated separately (the pole sits on the cut): exp(z) for
///    b == 1 and an Euler-type integral for b > 1.
///
/// Throws std::invalid_argument for bad parameters and std::domain_error for
/// z > 0 or NaN.
double ml(const MLParams& params, double z);

/// One-parameter function E_a(z) = E_{a,1}(z).
double ml_e1(double a, double z);

}  // namespace memkit
