#include "ktop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <lapacke.h>

namespace ktop {

namespace {

lapack_complex_double* lp(CMatrix& m) {
    return reinterpret_cast<lapack_complex_double*>(m.data());
}

double wrap_phase(double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    return phi;
}

} // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
    if (ra * rb <= 0 || ca * cb <= 0 ||
        ra > (1 << 24) / rb || ca > (1 << 24) / cb)
        throw std::invalid_argument("kron: dimension overflow");
    CMatrix out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i)
        for (Eigen::Index j = 0; j < ca; ++j)
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    return out;
}

double unitarity_residual(const CMatrix& u) {
    CMatrix g = u.adjoint() * u;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

SpectralDecomposition eig_unitary(const CMatrix& u, bool want_vectors) {
    if (u.rows() != u.cols() || u.rows() == 0)
        throw std::invalid_argument("eig_unitary: square non-empty matrix required");
    if (unitarity_residual(u) > 1e-8)
        throw std::invalid_argument("eig_unitary: input is not unitary (residual > 1e-8)");

    const lapack_int n = static_cast<lapack_int>(u.rows());
    CMatrix t = u;
    CMatrix q(want_vectors ? n : 1, want_vectors ? n : 1);
    std::vector<cxd> w(n);
    lapack_int sdim = 0;
    const lapack_int info = LAPACKE_zgees(
        LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'N', nullptr, n, lp(t), n, &sdim,
        reinterpret_cast<lapack_complex_double*>(w.data()), lp(q), q.rows());
    if (info != 0)
        throw std::runtime_error("eig_unitary: zgees failed to converge (info=" +
                                 std::to_string(info) + ")");

    if (want_vectors) {
        // For a normal matrix the Schur form is diagonal up to roundoff; the
        // strict upper triangle bounds the per-column eigen-residual.
        double res = 0.0;
        for (lapack_int c = 1; c < n; ++c)
            res = std::max(res, t.col(c).head(c).norm());
        if (res > 1e-10)
            throw std::runtime_error("eig_unitary: Schur residual " + std::to_string(res) +
                                     " exceeds 1e-10");
    }

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(n);
    for (lapack_int i = 0; i < n; ++i) phi[i] = wrap_phase(std::arg(w[i]));
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return phi[a] < phi[b]; });

    SpectralDecomposition out;
    out.phases.resize(n);
    if (want_vectors) out.vectors.resize(n, n);
    for (lapack_int i = 0; i < n; ++i) {
        out.phases[i] = phi[order[i]];
        if (want_vectors) out.vectors.col(i) = q.col(order[i]);
    }
    return out;
}

RVector eig_unitary_phases(const CMatrix& u) { return eig_unitary(u, false).phases; }

RVector svd_squares(const CMatrix& m) {
    const lapack_int rows = static_cast<lapack_int>(m.rows());
    const lapack_int cols = static_cast<lapack_int>(m.cols());
    CMatrix a = m;
    const lapack_int k = std::min(rows, cols);
    RVector s(k);
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, lp(a), rows,
                                           s.data(), nullptr, 1, nullptr, 1);
    if (info != 0)
        throw std::runtime_error("svd_squares: zgesdd failed (info=" + std::to_string(info) +
                                 ")");
    return s.array().square(); // zgesdd returns descending singular values
}

HermitianEig eig_hermitian(const CMatrix& h) {
    if (h.rows() != h.cols() || h.rows() == 0)
        throw std::invalid_argument("eig_hermitian: square non-empty matrix required");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("eig_hermitian: input is not Hermitian");

    const lapack_int n = static_cast<lapack_int>(h.rows());
    HermitianEig out;
    out.vectors = h;
    out.values.resize(n);
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, lp(out.vectors), n, out.values.data());
    if (info != 0)
        throw std::runtime_error("eig_hermitian: zheevd failed (info=" +
                                 std::to_string(info) + ")");
    return out;
}

CMatrix rotation_exp(const CMatrix& h, double t) {
    HermitianEig e = eig_hermitian(h);
    CVector d(e.values.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d[i] = std::polar(1.0, -t * e.values[i]);
    return e.vectors * d.asDiagonal() * e.vectors.adjoint();
}

} // namespace ktop
