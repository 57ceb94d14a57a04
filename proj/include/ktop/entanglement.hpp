#pragma once

#include <vector>

#include "ktop/common.hpp"
#include "ktop/rmt.hpp"
#include "ktop/rng.hpp"

namespace ktop {

// Schmidt eigenvalues of a bipartite pure state: descending, sum to 1.
struct SchmidtSpectrum {
    RVector values;
};

/// Squared singular values of the reshaped state (composite index
/// (i1,i2) -> i1*n2 + i2).  The state must be normalized; if n1 > n2 the
/// subsystem roles are swapped internally.
SchmidtSpectrum schmidt_spectrum(const CVector& state, int n1, int n2);

struct EntropyReport {
    double alpha = 1.0;
    double value = 0.0;
};

/// Moment mu_alpha = sum lambda_i^alpha.
double schmidt_moment(const SchmidtSpectrum& sp, double alpha);

/// HCT entropy S_alpha = (1 - mu_alpha)/(alpha - 1); alpha = 1 gives the
/// von Neumann entropy -sum lambda ln lambda (0 ln 0 = 0).
double hct_entropy(const SchmidtSpectrum& sp, double alpha);

std::vector<EntropyReport> moments_and_entropies(const SchmidtSpectrum& sp,
                                                 const std::vector<double>& alphas);

// Perturbative averages of the two largest Schmidt eigenvalues at small
// transition parameter.  ProductPhases uses the K0 coupling kernel
// (lambda1 = 1 - 4 sqrt(L)/pi); DiagonalPhases the Porter-Thomas kernel
// (lambda1 = 1 - 4 sqrt(L)/sqrt(2 pi)); lambda2 is a double quadrature
// against the closer-neighbor spacing density 2 e^{-2s}.
struct Lambda12Prediction {
    double lambda1 = 1.0;
    double lambda2 = 0.0;
};
Lambda12Prediction predicted_lambda12(double lambda, CouplingKind coupling);

// Entropy expansion coefficients for the COE transition ensembles:
//   mu_alpha = 1 - C sqrt(L) + C3 L,  C = C1 - C2.
// c1/c2/c3 come from singular-endpoint quadrature (t = u^2); c is the
// Gamma-ratio closed form.  c_quadrature carries the independently
// integrated difference C1 - C2 for cross-checking.
struct EntropyCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c = 0.0;
    double c_quadrature = 0.0;
};
EntropyCoefficients entropy_coefficients(double alpha, CouplingKind coupling);

/// Closed form C(alpha) = pref * (alpha-1) Gamma(alpha-1/2)/Gamma(alpha),
/// regular through alpha = 1 (C(1) = 0).
double entropy_c_closed_form(double alpha, CouplingKind coupling);

enum class EntropyRegime { Perturbative, Recursive };

// Entropy predictions for the product-phase (spin-spin) coupling.
// Perturbative: S_alpha ~ C(alpha)/(alpha-1) sqrt(L) - C3/(alpha-1) L.
// Recursive: S_alpha^inf [1 - exp(-C(alpha) sqrt(L) / ((alpha-1) S^inf))]
// with the Marcenko-Pastur saturation entropies; supported for alpha = 1
// (equal dims), integer-like alpha > 1 (equal dims) and alpha = 2 (any
// dims, Lubkin saturation).
double predicted_entropy(double alpha, double lambda, EntropyRegime regime, int n1,
                         int n2);

/// Saturation entropy S_alpha^inf used by the recursive prediction.
double saturation_entropy(double alpha, int n1, int n2);

/// Marcenko-Pastur density at ratio q = n2/n1 >= 1 (0 outside the support).
double marcenko_pastur_pdf(double q, double x);
double marcenko_pastur_cdf(double q, double x);

struct HaarEntropyAverages {
    double s1 = 0.0; // asymptotic von Neumann average ln N1 - N1/(2 N2)
    double s2 = 0.0; // exact linear-entropy average 1 - (N1+N2)/(1+N1 N2)
};
HaarEntropyAverages haar_average_entropies(int n1, int n2);

/// Haar-random pure state of dimension n.
CVector haar_random_state(Eigen::Index n, RngStream& stream);

} // namespace ktop
