#pragma once

namespace isobandit {

// Modified Bessel function of the second kind K_nu(x) for nu >= 0, x > 0.
//
// Temme's series for x < 2 and Steed's continued fraction (CF2) otherwise,
// both evaluated at the reduced order |mu| <= 1/2 and carried to nu by the
// (stable, upward) three-term recurrence. Relative accuracy ~1e-14 away from
// overflow/underflow.
double bessel_k(double nu, double x);

// exp(x) * K_nu(x); avoids underflow for large x.
double bessel_k_scaled(double nu, double x);

}  // namespace isobandit
