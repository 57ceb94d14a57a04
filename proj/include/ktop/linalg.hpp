#pragma once

#include "ktop/common.hpp"

namespace ktop {

/// Kronecker product with composite index (i1,i2) -> i1*rows(b)+i2.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// max |(u^dag u - 1)_ij|
double unitarity_residual(const CMatrix& u);

/// Eigenphases phi_n in [0, 2pi) sorted ascending, with the matching
/// orthonormal eigenvector columns.
struct SpectralDecomposition {
    RVector phases;
    CMatrix vectors;
};

// Spectral decomposition of a unitary matrix via the complex Schur form;
// column n satisfies ||u v_n - e^{i phi_n} v_n|| < 1e-10 and the vector
// matrix is unitary to machine precision.  Rejects non-unitary input.
SpectralDecomposition eig_unitary(const CMatrix& u, bool want_vectors = true);

/// Eigenphases only (skips accumulating Schur vectors; ~2.5x faster).
RVector eig_unitary_phases(const CMatrix& u);

/// Squared singular values, descending.  sum sigma_i^2 = ||m||_HS^2.
RVector svd_squares(const CMatrix& m);

struct HermitianEig {
    RVector values; // ascending
    CMatrix vectors;
};

/// Dense Hermitian eigensolver (rejects non-Hermitian input).
HermitianEig eig_hermitian(const CMatrix& h);

/// exp(-i t H) for Hermitian H, via the spectral decomposition.
CMatrix rotation_exp(const CMatrix& h, double t);

} // namespace ktop
