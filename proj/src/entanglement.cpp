#include "ktop/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include "ktop/linalg.hpp"
#include "ktop/quadrature.hpp"
#include "ktop/special.hpp"

namespace ktop {

SchmidtSpectrum schmidt_spectrum(const CVector& state, int n1, int n2) {
    if (state.size() != static_cast<Eigen::Index>(n1) * n2)
        throw std::invalid_argument("schmidt_spectrum: state size != n1*n2");
    if (std::abs(state.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("schmidt_spectrum: state is not normalized");
    const int rows = std::min(n1, n2);
    const int cols = std::max(n1, n2);
    CMatrix m(rows, cols);
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b) {
            const cxd x = state[composite_index(a, b, n2)];
            if (n1 <= n2)
                m(a, b) = x;
            else
                m(b, a) = x; // swapped roles leave the squared spectrum unchanged
        }
    SchmidtSpectrum sp;
    sp.values = svd_squares(m);
    return sp;
}

double schmidt_moment(const SchmidtSpectrum& sp, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("schmidt_moment: alpha > 0 required");
    double mu = 0.0;
    for (double l : sp.values)
        if (l > 0.0) mu += std::pow(l, alpha);
    return mu;
}

double hct_entropy(const SchmidtSpectrum& sp, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("hct_entropy: alpha > 0 required");
    if (alpha == 1.0) {
        double s = 0.0;
        for (double l : sp.values)
            if (l > 0.0) s -= l * std::log(l);
        return s;
    }
    return (1.0 - schmidt_moment(sp, alpha)) / (alpha - 1.0);
}

std::vector<EntropyReport> moments_and_entropies(const SchmidtSpectrum& sp,
                                                 const std::vector<double>& alphas) {
    std::vector<EntropyReport> out;
    out.reserve(alphas.size());
    for (double a : alphas) out.push_back({a, hct_entropy(sp, a)});
    return out;
}

// --- perturbative Schmidt eigenvalues --------------------------------------

namespace {

// Coupling-element kernels in u = sqrt(omega): rho(omega) domega = k(u) du.
double kernel_u(CouplingKind coupling, double u) {
    if (coupling == CouplingKind::DiagonalPhases)
        return std::sqrt(2.0 / kPi) * std::exp(-0.5 * u * u);
    return 2.0 / kPi * bessel_k0(std::max(u, 1e-300)); // product structure
}

} // namespace

Lambda12Prediction predicted_lambda12(double lambda, CouplingKind coupling) {
    if (lambda < 0.0)
        throw std::invalid_argument("predicted_lambda12: lambda >= 0 required");
    Lambda12Prediction out;
    const bool product = coupling != CouplingKind::DiagonalPhases;
    out.lambda1 = product ? 1.0 - 4.0 / kPi * std::sqrt(lambda)
                          : 1.0 - 4.0 / std::sqrt(kTwoPi) * std::sqrt(lambda);
    if (lambda == 0.0) return out;

    // lambda2 = int ds int du k(u) e^{-2s} (1 - s/sqrt(s^2 + 4 L u^2))
    const QuadratureSpec inner_spec{1e-9, 1e-13, 600};
    const QuadratureSpec outer_spec{1e-8, 1e-12, 600};
    auto inner = [&](double s) {
        return integrate_1d(
                   [&](double u) {
                       const double r = std::sqrt(s * s + 4.0 * lambda * u * u);
                       const double frac = r > 0.0 ? 1.0 - s / r : 1.0;
                       return kernel_u(coupling, u) * frac;
                   },
                   0.0, 45.0, inner_spec)
            .value;
    };
    out.lambda2 =
        integrate_1d([&](double s) { return std::exp(-2.0 * s) * inner(s); }, 0.0, 40.0,
                     outer_spec)
            .value;
    return out;
}

// --- entropy coefficients ---------------------------------------------------

namespace {

struct KernelPrefactors {
    double single; // C1, C2 prefactor
    double twofold; // C3 prefactor
    double closed; // closed-form C(alpha) prefactor over the Gamma ratio
};

KernelPrefactors prefactors(CouplingKind coupling) {
    if (coupling == CouplingKind::DiagonalPhases)
        return {std::sqrt(2.0 / kPi), 1.0 / kPi, 2.0 * std::sqrt(2.0)};
    return {2.0 / kPi, 2.0 / kPi / kPi, 4.0 / std::sqrt(kPi)};
}

// int_0^{1/2} (1-(1-t)^alpha) / (t(1-t))^{3/2} dt with t = u^2.
double c1_integral(double alpha) {
    const QuadratureSpec spec{1e-12, 1e-14, 2000};
    return 2.0 *
           integrate_1d(
               [&](double u) {
                   const double t = u * u;
                   const double num = -std::expm1(alpha * std::log1p(-t));
                   return num / (t * std::pow(1.0 - t, 1.5));
               },
               0.0, std::sqrt(0.5), spec)
               .value;
}

// int_0^{1/2} t^{alpha - 3/2} (1-t)^{-3/2} dt with t = u^2.
double c2_integral(double alpha) {
    const QuadratureSpec spec{1e-12, 1e-14, 2000};
    return 2.0 *
           integrate_1d(
               [&](double u) {
                   const double t = u * u;
                   return std::pow(u, 2.0 * alpha - 2.0) * std::pow(1.0 - t, -1.5);
               },
               0.0, std::sqrt(0.5), spec)
               .value;
}

// Combined integrand for C1 - C2: the numerator 1 - (1-t)^alpha - t^alpha
// is evaluated through expm1 so the difference stays accurate down to
// alpha -> 1 where C vanishes linearly.
double c_diff_integral(double alpha) {
    const QuadratureSpec spec{1e-11, 1e-15, 2000};
    const double d = alpha - 1.0;
    return 2.0 *
           integrate_1d(
               [&](double u) {
                   const double t = u * u;
                   const double one_m_t = 1.0 - t;
                   const double num = -(one_m_t * std::expm1(d * std::log(one_m_t)) +
                                        t * std::expm1(d * std::log(t)));
                   return num / (t * std::pow(one_m_t, 1.5));
               },
               0.0, std::sqrt(0.5), spec)
               .value;
}

// Double integral for C3 (both axes substituted t = u^2).
double c3_integral(double alpha) {
    const QuadratureSpec spec{1e-9, 1e-12, 4000};
    auto f = [&](double u1, double u2) {
        const double t1 = u1 * u1, t2 = u2 * u2;
        const double num = 1.0 + std::pow(std::max(1.0 - t1 - t2, 0.0), alpha) -
                           std::pow(1.0 - t1, alpha) - std::pow(1.0 - t2, alpha);
        return 4.0 * num /
               (t1 * std::pow(1.0 - t1, 1.5) * t2 * std::pow(1.0 - t2, 1.5));
    };
    const double b = std::sqrt(0.5);
    return integrate_2d(f, {0.0, b, 0.0, b}, spec).value;
}

} // namespace

double entropy_c_closed_form(double alpha, CouplingKind coupling) {
    if (!(alpha > 0.5))
        throw std::domain_error("entropy_c_closed_form: requires alpha > 1/2");
    // (alpha-1)/Gamma(alpha-1) = Gamma(alpha) form keeps alpha = 1 regular.
    return prefactors(coupling).closed * (alpha - 1.0) * gamma(alpha - 0.5) / gamma(alpha);
}

EntropyCoefficients entropy_coefficients(double alpha, CouplingKind coupling) {
    if (!(alpha > 0.5))
        throw std::domain_error("entropy_coefficients: integrals diverge for alpha <= 1/2");
    const KernelPrefactors pref = prefactors(coupling);
    EntropyCoefficients out;
    out.c1 = pref.single * c1_integral(alpha);
    out.c2 = pref.single * c2_integral(alpha);
    out.c3 = pref.twofold * c3_integral(alpha);
    out.c = entropy_c_closed_form(alpha, coupling);
    out.c_quadrature =
        alpha >= 1.0 ? pref.single * c_diff_integral(alpha) : out.c1 - out.c2;
    return out;
}

// --- entropy predictions (product-phase kernel) -----------------------------

namespace {

double catalan_like(double alpha) {
    // C_alpha = binom(2a, a)/(a+1), continued in alpha through Gamma.
    return gamma(2.0 * alpha + 1.0) / (gamma(alpha + 1.0) * gamma(alpha + 2.0));
}

} // namespace

double saturation_entropy(double alpha, int n1, int n2) {
    if (n1 < 2 || n2 < 2)
        throw std::invalid_argument("saturation_entropy: n1, n2 >= 2 required");
    if (alpha == 2.0) {
        const double nn = static_cast<double>(n1) * n2;
        return 1.0 - (n1 + n2) / (1.0 + nn); // exact finite-N average
    }
    if (n1 != n2)
        throw std::invalid_argument(
            "saturation_entropy: unequal dimensions only supported for alpha = 2");
    if (alpha == 1.0) return std::log(static_cast<double>(n1)) - 0.5;
    if (alpha > 1.0)
        return (1.0 - catalan_like(alpha) * std::pow(static_cast<double>(n1), 1.0 - alpha)) /
               (alpha - 1.0);
    throw std::invalid_argument("saturation_entropy: alpha < 1 not supported");
}

double predicted_entropy(double alpha, double lambda, EntropyRegime regime, int n1,
                         int n2) {
    if (lambda < 0.0)
        throw std::invalid_argument("predicted_entropy: lambda >= 0 required");
    const double sqrt_l = std::sqrt(lambda);
    if (regime == EntropyRegime::Perturbative) {
        if (alpha == 1.0) return 4.0 * sqrt_l - (4.0 / kPi - 1.0) * lambda;
        if (!(alpha > 0.5))
            throw std::domain_error("predicted_entropy: perturbative needs alpha > 1/2");
        const double lead = 4.0 / std::sqrt(kPi) * gamma(alpha - 0.5) / gamma(alpha);
        const double c3 = prefactors(CouplingKind::ProductPhases).twofold *
                          c3_integral(alpha) / (alpha - 1.0);
        return lead * sqrt_l - c3 * lambda;
    }
    const double s_inf = saturation_entropy(alpha, n1, n2);
    // rate C(alpha)/(alpha-1) -> 4 as alpha -> 1
    const double rate = alpha == 1.0
                            ? 4.0
                            : 4.0 / std::sqrt(kPi) * gamma(alpha - 0.5) / gamma(alpha);
    return s_inf * -std::expm1(-rate * sqrt_l / s_inf);
}

// --- Marcenko-Pastur and Haar averages --------------------------------------

double marcenko_pastur_pdf(double q, double x) {
    if (q < 1.0) throw std::invalid_argument("marcenko_pastur_pdf: q >= 1 required");
    const double xm = 1.0 + 1.0 / q - 2.0 / std::sqrt(q);
    const double xp = 1.0 + 1.0 / q + 2.0 / std::sqrt(q);
    if (x <= xm || x >= xp) return 0.0;
    return q / (2.0 * kPi) * std::sqrt((xp - x) * (x - xm)) / x;
}

double marcenko_pastur_cdf(double q, double x) {
    if (q < 1.0) throw std::invalid_argument("marcenko_pastur_cdf: q >= 1 required");
    const double xm = 1.0 + 1.0 / q - 2.0 / std::sqrt(q);
    const double xp = 1.0 + 1.0 / q + 2.0 / std::sqrt(q);
    if (x <= xm) return 0.0;
    if (x >= xp) return 1.0;
    // x = xm cos^2(phi) + xp sin^2(phi) removes both edge singularities.
    const double phi = std::asin(std::sqrt((x - xm) / (xp - xm)));
    const double w = xp - xm;
    const QuadratureSpec spec{1e-10, 1e-13, 800};
    return q / (2.0 * kPi) * w * w *
           integrate_1d(
               [&](double p) {
                   const double sp = std::sin(p), cp = std::cos(p);
                   const double xx = xm * cp * cp + xp * sp * sp;
                   return sp * sp * cp * cp / xx;
               },
               0.0, phi, spec)
               .value *
           2.0;
}

HaarEntropyAverages haar_average_entropies(int n1, int n2) {
    if (n1 < 2 || n2 < 2 || n1 > n2)
        throw std::invalid_argument("haar_average_entropies: need 2 <= n1 <= n2");
    HaarEntropyAverages out;
    out.s1 = std::log(static_cast<double>(n1)) - 0.5 * n1 / n2;
    out.s2 = 1.0 - (n1 + n2) / (1.0 + static_cast<double>(n1) * n2);
    return out;
}

CVector haar_random_state(Eigen::Index n, RngStream& stream) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cxd(stream.gaussian(), stream.gaussian());
    v /= v.norm();
    return v;
}

} // namespace ktop
