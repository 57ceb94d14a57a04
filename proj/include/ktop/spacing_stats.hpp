#pragma once

#include <functional>
#include <vector>

#include "ktop/common.hpp"
#include "ktop/rmt.hpp"

namespace ktop {

// Circular consecutive spacings rescaled by the mean spacing D = 2pi/N;
// the wrap-around gap is included, so the sample sums to N exactly.
struct SpacingSample {
    std::vector<double> spacings;
    double mean_spacing_d = 0.0;
};

SpacingSample spacings_from_phases(const RVector& phases_sorted);

struct Histogram {
    std::vector<double> edges;   // ascending, size bins+1
    std::vector<double> density; // probability density per bin
    std::size_t count = 0;       // samples inside the edges
    std::size_t outside = 0;     // samples dropped left/right of the edges
};

Histogram histogram(const std::vector<double>& sample, const std::vector<double>& edges);

std::vector<double> uniform_edges(double lo, double hi, int bins);

/// Kolmogorov-Smirnov sup distance between a sample and a CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample KS distance.
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

enum class SpacingLaw { Poisson, WignerCoe, N1Coe, CloserNeighbor };

/// Reference spacing densities; n1 only used by N1Coe.
double reference_pdf(SpacingLaw law, double s, int n1 = 1);

/// Matching closed-form CDFs (the N1COE one integrates exactly).
double reference_cdf(SpacingLaw law, double s, int n1 = 1);

// Perturbative spacing distribution for transition parameter lambda and a
// given coupling-element kernel: the regularized degenerate-PT spacing
// s -> sqrt(s0^2 + 4 lambda w) averaged over Poisson s0 and the omega
// density, then rescaled back to unit mean.
class PerturbativeSpacing {
  public:
    PerturbativeSpacing(double lambda, Symmetry sym, CouplingKind coupling);

    double pdf(double s) const;
    double cdf(double s) const;
    double mean_before_rescale() const { return s_bar_; }

  private:
    double raw_pdf(double s) const; // P~ before the unit-mean rescale
    double lambda_;
    Symmetry sym_;
    CouplingKind coupling_;
    double s_bar_ = 1.0;
    std::vector<double> grid_, cum_; // cumulative table of the rescaled pdf
};

/// Densities of the rescaled curve on a grid (unit norm and unit mean).
std::vector<double> perturbative_spacing_pdf(double lambda, Symmetry sym,
                                             CouplingKind coupling,
                                             const std::vector<double>& s_grid);

} // namespace ktop
