#include "ktop/spin.hpp"

#include <cmath>

#include "ktop/linalg.hpp"

namespace ktop {

namespace {
double m_of_index(int j, int i) { return static_cast<double>(j - i); }
} // namespace

CMatrix jz(int j) {
    const int n = 2 * j + 1;
    CMatrix out = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) out(i, i) = m_of_index(j, i);
    return out;
}

CMatrix jplus(int j) {
    const int n = 2 * j + 1;
    CMatrix out = CMatrix::Zero(n, n);
    // <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)); m+1 sits one row above m.
    for (int i = 1; i < n; ++i) {
        const double m = m_of_index(j, i);
        out(i - 1, i) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
    return out;
}

CMatrix jminus(int j) { return jplus(j).adjoint(); }

CMatrix jy(int j) {
    return (jplus(j) - jminus(j)) / cxd(0.0, 2.0);
}

CMatrix jx(int j) { return 0.5 * (jplus(j) + jminus(j)); }

CVector top_kick_diagonal(const TopParams& p) {
    p.validate();
    const int n = p.dim();
    CVector d(n);
    for (int i = 0; i < n; ++i) {
        const double m = m_of_index(p.j, i);
        const double phase = -p.k / (2.0 * p.j) * (m + p.alpha) * (m + p.alpha);
        d[i] = std::polar(1.0, phase);
    }
    return d;
}

CMatrix top_floquet(const TopParams& p) {
    p.validate();
    const CMatrix rot = rotation_exp(jy(p.j), 0.5 * kPi);
    return top_kick_diagonal(p).asDiagonal() * rot;
}

} // namespace ktop
