#pragma once

#include <functional>
#include <vector>

#include "ktop/common.hpp"
#include "ktop/rng.hpp"

namespace ktop {

enum class Symmetry { COE, CUE };
enum class CouplingKind { DiagonalPhases, ProductPhases, KickedTopV12 };

struct EnsembleSpec {
    Symmetry symmetry = Symmetry::COE;
    CouplingKind coupling = CouplingKind::DiagonalPhases;
    int n1 = 2;
    int n2 = 2;
    double epsilon = 0.0;
    int realizations = 1;
    std::uint64_t base_seed = 0;

    void validate() const {
        if (n1 < 2 || n2 < 2)
            throw std::invalid_argument("EnsembleSpec: n1, n2 >= 2 required");
        if (realizations < 1)
            throw std::invalid_argument("EnsembleSpec: realizations >= 1 required");
    }
};

/// Haar-distributed unitary (Ginibre draw + QR with phase-fixed R diagonal).
CMatrix haar_unitary(int n, RngStream& stream);

/// Haar-distributed real orthogonal matrix.
RMatrix haar_orthogonal(int n, RngStream& stream);

CMatrix sample_cue(int n, RngStream& stream);

/// COE sample W = U^T U, symmetric unitary.
CMatrix sample_coe(int n, RngStream& stream);

/// Diagonal of V12 for the requested coupling (phases, not the exponential).
RVector build_coupling(const EnsembleSpec& spec, RngStream& stream);

// Ensemble-averaged transition parameter from the three basis-independent
// invariants of a diagonal coupling U12.
double lambda_coe_from_invariants(int n1, int n2, double trace_sq, double norm1_sq,
                                  double norm2_sq);
double lambda_cue_from_invariants(int n1, int n2, double trace_sq, double norm1_sq,
                                  double norm2_sq);

/// Transition parameter of a concrete diagonal U12 (entries as a vector in
/// the composite index).
double lambda_general(Symmetry sym, const CVector& u12_diagonal, int n1, int n2);

/// Overload validating that the matrix really is diagonal unitary.
double lambda_general(Symmetry sym, const CMatrix& u12, int n1, int n2);

// Closed-form ensemble average of Lambda(eps).  DiagonalPhases is exact in
// eps (sinc^2 form); ProductPhases uses the Si/chi trace averages, with an
// optional small-eps quadratic instead.
double lambda_ensemble_closed_form(Symmetry sym, CouplingKind coupling, int n1, int n2,
                                   double eps, bool small_eps_quadratic = false);

/// Density of the normalized squared coupling element omega, unit mean.
double omega_density(Symmetry sym, CouplingKind coupling, double w);

/// Matching cumulative distribution (analytic where available, else a
/// precomputed high-accuracy table).
std::function<double(double)> omega_cdf(Symmetry sym, CouplingKind coupling);

// Squared coupling elements in a sampled eigenbasis of U1 x U2, normalized
// to unit sample mean.  One random off-diagonal pair per realization by
// default; full_pairs collects all N(N-1) of them (small N only).  The
// eigenbases are drawn directly from the eigenvector measure of the
// ensemble (Haar orthogonal for COE, Haar unitary for CUE).
std::vector<double> offdiag_element_samples(const EnsembleSpec& spec,
                                            int pairs_per_realization = 1,
                                            bool full_pairs = false);

struct FourthMomentSample {
    double diag_mean = 0.0;    // mean over i,k of |E_ik|^4
    double offdiag_mean = 0.0; // mean over i, k != l of |E_ik|^2 |E_il|^2
};

/// Per-draw eigenvector fourth moments of sampled COE/CUE matrices,
/// obtained by actually diagonalizing each sample.
std::vector<FourthMomentSample> eigvec_fourth_moments(Symmetry sym, int n, int draws,
                                                      std::uint64_t seed);

} // namespace ktop
