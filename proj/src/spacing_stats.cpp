#include "ktop/spacing_stats.hpp"

#include <algorithm>
#include <cmath>

#include "ktop/quadrature.hpp"
#include "ktop/special.hpp"

namespace ktop {

SpacingSample spacings_from_phases(const RVector& phases) {
    const Eigen::Index n = phases.size();
    if (n < 2) throw std::invalid_argument("spacings_from_phases: need >= 2 phases");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (phases[i] < 0.0 || phases[i] >= kTwoPi)
            throw std::invalid_argument("spacings_from_phases: phases must lie in [0, 2pi)");
        if (i > 0 && phases[i] < phases[i - 1])
            throw std::invalid_argument("spacings_from_phases: phases must be sorted");
    }
    SpacingSample out;
    out.mean_spacing_d = kTwoPi / static_cast<double>(n);
    out.spacings.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        out.spacings[static_cast<std::size_t>(i)] =
            (phases[i + 1] - phases[i]) / out.mean_spacing_d;
    out.spacings.back() = (kTwoPi - phases[n - 1] + phases[0]) / out.mean_spacing_d;
    return out;
}

std::vector<double> uniform_edges(double lo, double hi, int bins) {
    if (bins < 1 || !(hi > lo)) throw std::invalid_argument("uniform_edges: bad range");
    std::vector<double> e(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i)
        e[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
    return e;
}

Histogram histogram(const std::vector<double>& sample, const std::vector<double>& edges) {
    if (sample.empty()) throw std::invalid_argument("histogram: empty sample");
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
        throw std::invalid_argument("histogram: need ascending edges");
    Histogram h;
    h.edges = edges;
    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (double x : sample) {
        if (x < edges.front() || x >= edges.back()) {
            ++h.outside;
            continue;
        }
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
        ++h.count;
    }
    h.density.resize(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const double width = edges[b + 1] - edges[b];
        h.density[b] = h.count ? static_cast<double>(counts[b]) / (h.count * width) : 0.0;
    }
    return h;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_distance_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

double reference_pdf(SpacingLaw law, double s, int n1) {
    if (s < 0.0) return 0.0;
    switch (law) {
        case SpacingLaw::Poisson:
            return std::exp(-s);
        case SpacingLaw::WignerCoe:
            return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
        case SpacingLaw::CloserNeighbor:
            return 2.0 * std::exp(-2.0 * s);
        case SpacingLaw::N1Coe: {
            if (n1 < 1) throw std::invalid_argument("reference_pdf: N1COE needs n1 >= 1");
            const double t1 = erfc(std::sqrt(kPi) * s / (2.0 * n1));
            const double t2 = std::exp(-kPi * s * s / (4.0 * n1 * n1));
            return std::pow(t1, n1 - 2) * t2 *
                   ((1.0 - 1.0 / n1) * t2 + kPi * s / (2.0 * n1 * n1) * t1);
        }
    }
    throw std::logic_error("reference_pdf: unknown law");
}

double reference_cdf(SpacingLaw law, double s, int n1) {
    if (s <= 0.0) return 0.0;
    switch (law) {
        case SpacingLaw::Poisson:
            return -std::expm1(-s);
        case SpacingLaw::WignerCoe:
            return -std::expm1(-0.25 * kPi * s * s);
        case SpacingLaw::CloserNeighbor:
            return -std::expm1(-2.0 * s);
        case SpacingLaw::N1Coe: {
            if (n1 < 1) throw std::invalid_argument("reference_cdf: N1COE needs n1 >= 1");
            // d/ds [1 - t1^(n1-1) t2] reproduces the density above.
            const double t1 = erfc(std::sqrt(kPi) * s / (2.0 * n1));
            const double t2 = std::exp(-kPi * s * s / (4.0 * n1 * n1));
            return 1.0 - std::pow(t1, n1 - 1) * t2;
        }
    }
    throw std::logic_error("reference_cdf: unknown law");
}

// --- perturbative spacing -------------------------------------------------

namespace {

// After integrating out the delta function against Poisson P0 and removing
// both square-root endpoints with omega = (s^2/4L) sin^2(theta):
//   P~(s) = (s^2/2L) int_0^{pi/2} rho(omega) sin(theta) e^{-s cos(theta)} dtheta,
// where the kernels with an omega^{-1/2} prefactor cancel sin(theta)
// analytically.
double raw_integrand_prefactor(double s, double lambda, Symmetry sym, CouplingKind c,
                               double theta, bool product) {
    const double sl = std::sqrt(lambda);
    const double sin_t = std::sin(theta);
    if (sym == Symmetry::COE && !product) {
        const double w = s * s * sin_t * sin_t / (4.0 * lambda);
        (void)c;
        return s / std::sqrt(kTwoPi * lambda) * std::exp(-0.5 * w);
    }
    if (sym == Symmetry::CUE && !product) {
        const double w = s * s * sin_t * sin_t / (4.0 * lambda);
        return s * s / (2.0 * lambda) * std::exp(-w) * sin_t;
    }
    if (sym == Symmetry::COE) {
        const double arg = s * sin_t / (2.0 * sl);
        return s / (kPi * sl) * (arg > 0.0 ? bessel_k0(arg) : 0.0);
    }
    const double arg = s * sin_t / sl;
    return s * s / lambda * (arg > 0.0 ? bessel_k0(arg) : 0.0) * sin_t;
}

} // namespace

double PerturbativeSpacing::raw_pdf(double s) const {
    if (s <= 0.0) return 0.0;
    const bool product = coupling_ != CouplingKind::DiagonalPhases;
    const QuadratureSpec spec{1e-8, 1e-12, 600};
    auto f = [&](double theta) {
        const double pre =
            raw_integrand_prefactor(s, lambda_, sym_, coupling_, theta, product);
        return pre * std::exp(-s * std::cos(theta));
    };
    return integrate_1d(f, 0.0, 0.5 * kPi, spec).value;
}

PerturbativeSpacing::PerturbativeSpacing(double lambda, Symmetry sym, CouplingKind coupling)
    : lambda_(lambda), sym_(sym), coupling_(coupling) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("PerturbativeSpacing: lambda > 0 required");

    const double s_cut = 45.0 + 10.0 * std::sqrt(lambda);
    const QuadratureSpec spec{1e-8, 1e-10, 2000};
    s_bar_ = integrate_1d([&](double s) { return s * raw_pdf(s); }, 0.0, s_cut, spec).value;

    // Cumulative table of the rescaled pdf (Simpson per cell); cdf lookups
    // interpolate linearly, cheap enough for KS over large samples.
    const int cells = 2400;
    const double hi = 12.0;
    grid_.resize(cells + 1);
    cum_.resize(cells + 1);
    grid_[0] = 0.0;
    cum_[0] = 0.0;
    double p_left = 0.0;
    for (int i = 1; i <= cells; ++i) {
        grid_[i] = hi * i / cells;
        const double h = grid_[i] - grid_[i - 1];
        const double p_mid = pdf(grid_[i - 1] + 0.5 * h);
        const double p_right = pdf(grid_[i]);
        cum_[i] = cum_[i - 1] + h / 6.0 * (p_left + 4.0 * p_mid + p_right);
        p_left = p_right;
    }
}

double PerturbativeSpacing::pdf(double s) const {
    if (s <= 0.0) return 0.0;
    return s_bar_ * raw_pdf(s_bar_ * s);
}

double PerturbativeSpacing::cdf(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= grid_.back()) return 1.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double t = (s - grid_[k]) / (grid_[k + 1] - grid_[k]);
    return std::min(1.0, cum_[k] + t * (cum_[k + 1] - cum_[k]));
}

std::vector<double> perturbative_spacing_pdf(double lambda, Symmetry sym,
                                             CouplingKind coupling,
                                             const std::vector<double>& s_grid) {
    PerturbativeSpacing curve(lambda, sym, coupling);
    std::vector<double> out(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) out[i] = curve.pdf(s_grid[i]);
    return out;
}

} // namespace ktop
