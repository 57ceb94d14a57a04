#pragma once

#include "ktop/common.hpp"
#include "ktop/spin.hpp"

namespace ktop {

struct CoupledTopParams {
    TopParams top1;
    TopParams top2;
    double epsilon = 0.0;

    Eigen::Index dim() const {
        return static_cast<Eigen::Index>(top1.dim()) * top2.dim();
    }
    void validate() const {
        top1.validate();
        top2.validate();
        if (epsilon < 0.0)
            throw std::invalid_argument("CoupledTopParams: epsilon must be >= 0");
    }
};

/// Diagonal of V12 = (Jz1 x Jz2)/sqrt(j1 j2): entries m1*m2/sqrt(j1 j2)
/// in the composite ordering (m decreasing in each factor).
RVector coupling_v12_diagonal(int j1, int j2);

/// Same as a dense diagonal matrix.
CMatrix coupling_v12(int j1, int j2);

/// Full Floquet operator exp(i eps V12) (U1 x U2).
CMatrix full_floquet(const CoupledTopParams& p);

/// Sorted eigenphases of U1 x U2 (sums of single-top phases mod 2pi).
/// At eps = 0 the eigenstates are products, so no large diagonalization
/// is needed.
RVector uncoupled_phases(const TopParams& t1, const TopParams& t2);

enum class LambdaMethod { ExactSum, Asymptotic };

struct LambdaReport {
    double lambda = 0.0;
    double trace_sq = 0.0;  // |tr U12|^2
    double norm1_sq = 0.0;  // ||U12^(1)||^2
    double norm2_sq = 0.0;  // ||U12^(2)||^2
    LambdaMethod method = LambdaMethod::ExactSum;
};

// Transition parameter of the spin-spin coupling for COE-like subsystems.
// ExactSum evaluates the lattice sums (factorized into Dirichlet kernels,
// O(N1+N2)); Asymptotic uses the Si/chi continuum approximation with
// kappa = eps*N1*N2/(2 sqrt(j1 j2)).
LambdaReport lambda_kicked_tops(const CoupledTopParams& p,
                                LambdaMethod method = LambdaMethod::ExactSum);

/// Saturation value of the transition parameter at strong coupling.
double lambda_max(int n1, int n2);

// Inverse map Lambda -> eps by bisection of the exact-sum Lambda(eps) on
// its first monotone branch.  Targets at or beyond the branch maximum (or
// beyond lambda_max) raise std::domain_error: the coupling revives at
// large eps, so a global inverse does not exist.
double epsilon_for_lambda(int j1, int j2, double target_lambda);

namespace detail {
/// sum_{s=-j}^{j} e^{i theta s} = sin(n theta/2)/sin(theta/2), n = 2j+1.
double dirichlet_kernel(double theta, int n);
} // namespace detail

} // namespace ktop
