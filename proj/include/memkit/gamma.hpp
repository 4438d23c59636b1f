#pragma once

namespace memkit {

/// Gamma function via the Lanczos approximation (g = 7, 9 coefficients),
/// with the reflection formula for x < 1/2. Positive integers up to 171 are
/// returned from an exact factorial table.
///
/// Nonpositive integers are poles and return +infinity; arguments whose
/// result overflows a double also return +infinity.
double gamma(double x);

/// 1 / Gamma(x). Poles map to exactly 0, as does overflow of Gamma for large
/// positive x. For very negative non-integer x the magnitude can overflow.
double rgamma(double x);

/// sin(pi * x) with exact argument reduction, so that integers give exactly
/// 0 and half-integers exactly +-1.
double sin_pi(double x);

/// cos(pi * x) with exact argument reduction.
double cos_pi(double x);

}  // namespace memkit
