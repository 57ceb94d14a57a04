#pragma once

namespace ktop {

/// Modified Bessel function of the second kind K0, x > 0, ~1e-13 relative.
double bessel_k0(double x);

/// Sine integral Si(x) = int_0^x sin(t)/t dt; odd, Si(inf) = pi/2.
double sine_integral(double x);

/// chi(x) = x Si(x) + cos(x) - 1, the combination entering the
/// trace formulas of the product-phase and spin-spin couplings.
double sine_integral_chi(double x);

double erfc(double x);
double gamma(double x);

/// Lower incomplete Beta B_z(a,b) = int_0^z t^(a-1) (1-t)^(b-1) dt,
/// by the power series in z.  Requires a > 0 and 0 <= z <= 3/4; b may be
/// negative (the b = -1/2 case is the one used here).
double incomplete_beta(double z, double a, double b);

/// Gauss hypergeometric 2F1(a,b;c;z) by direct series; |z| <= 3/4 only
/// (all uses here are at z = 1/2).
double hyp2f1(double a, double b, double c, double z);

namespace detail {
// The two independent evaluation routes for K0; bessel_k0 switches at x = 1.
double k0_power_series(double x);
double k0_cosh_integral(double x);
double si_power_series(double x);
double si_auxiliary(double x);
} // namespace detail

} // namespace ktop
