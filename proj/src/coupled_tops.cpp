#include "ktop/coupled_tops.hpp"

#include <algorithm>
#include <cmath>

#include "ktop/linalg.hpp"
#include "ktop/rmt.hpp"
#include "ktop/special.hpp"

namespace ktop {

namespace detail {

double dirichlet_kernel(double theta, int n) {
    // n odd here, so the kernel has period 2pi exactly.
    double r = std::remainder(theta, kTwoPi);
    const double s = std::sin(0.5 * r);
    if (std::abs(s) < 1e-12) return static_cast<double>(n);
    return std::sin(0.5 * n * r) / s;
}

} // namespace detail

RVector coupling_v12_diagonal(int j1, int j2) {
    if (j1 < 1 || j2 < 1)
        throw std::invalid_argument("coupling_v12: integer j1, j2 >= 1 required");
    const int n1 = 2 * j1 + 1, n2 = 2 * j2 + 1;
    const double scale = 1.0 / std::sqrt(static_cast<double>(j1) * j2);
    RVector v(static_cast<Eigen::Index>(n1) * n2);
    for (int a = 0; a < n1; ++a) {
        const double m1 = j1 - a;
        for (int b = 0; b < n2; ++b) {
            const double m2 = j2 - b;
            v[composite_index(a, b, n2)] = m1 * m2 * scale;
        }
    }
    return v;
}

CMatrix coupling_v12(int j1, int j2) {
    const RVector v = coupling_v12_diagonal(j1, j2);
    CMatrix out = CMatrix::Zero(v.size(), v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i, i) = v[i];
    return out;
}

CMatrix full_floquet(const CoupledTopParams& p) {
    p.validate();
    CMatrix u = kron(top_floquet(p.top1), top_floquet(p.top2));
    if (p.epsilon != 0.0) {
        const RVector v = coupling_v12_diagonal(p.top1.j, p.top2.j);
        for (Eigen::Index r = 0; r < u.rows(); ++r)
            u.row(r) *= std::polar(1.0, p.epsilon * v[r]);
    }
    return u;
}

RVector uncoupled_phases(const TopParams& t1, const TopParams& t2) {
    const RVector p1 = eig_unitary_phases(top_floquet(t1));
    const RVector p2 = eig_unitary_phases(top_floquet(t2));
    RVector out(p1.size() * p2.size());
    Eigen::Index k = 0;
    for (Eigen::Index a = 0; a < p1.size(); ++a)
        for (Eigen::Index b = 0; b < p2.size(); ++b) {
            double s = p1[a] + p2[b];
            if (s >= kTwoPi) s -= kTwoPi;
            out[k++] = s;
        }
    std::sort(out.begin(), out.end());
    return out;
}

LambdaReport lambda_kicked_tops(const CoupledTopParams& p, LambdaMethod method) {
    p.validate();
    const int j1 = p.top1.j, j2 = p.top2.j;
    const int n1 = 2 * j1 + 1, n2 = 2 * j2 + 1;
    const double eps = p.epsilon;

    LambdaReport rep;
    rep.method = method;

    if (method == LambdaMethod::ExactSum) {
        const double x = eps / std::sqrt(static_cast<double>(j1) * j2);
        double trace = 0.0, norm1 = 0.0, norm2 = 0.0;
        for (int s = -j1; s <= j1; ++s) {
            const double d = detail::dirichlet_kernel(x * s, n2);
            trace += d;
            norm1 += d * d;
        }
        for (int s = -j2; s <= j2; ++s) {
            const double d = detail::dirichlet_kernel(x * s, n1);
            norm2 += d * d;
        }
        rep.trace_sq = trace * trace;
        rep.norm1_sq = norm1;
        rep.norm2_sq = norm2;
    } else {
        const double sj = std::sqrt(static_cast<double>(j1) * j2);
        const double kappa = eps * n1 * n2 / (2.0 * sj);
        if (eps == 0.0) {
            rep.trace_sq = static_cast<double>(n1) * n1 * n2 * n2;
            rep.norm1_sq = static_cast<double>(n1) * n2 * n2;
            rep.norm2_sq = static_cast<double>(n1) * n1 * n2;
        } else {
            const double t = 4.0 * sj / eps * sine_integral(0.5 * kappa);
            rep.trace_sq = t * t;
            const double c = 8.0 * j1 * j2 / (eps * eps) * sine_integral_chi(kappa);
            rep.norm1_sq = c / n1;
            rep.norm2_sq = c / n2;
        }
    }

    rep.lambda = lambda_coe_from_invariants(n1, n2, rep.trace_sq, rep.norm1_sq, rep.norm2_sq);
    // Roundoff in the sums can leave a tiny negative bracket at eps = 0.
    if (rep.lambda < 0.0 && rep.lambda > -1e-9) rep.lambda = 0.0;
    return rep;
}

double lambda_max(int n1, int n2) {
    const double nn = static_cast<double>(n1) * n2;
    return nn * nn * (nn + 2.0 * (n1 + n2)) /
           (4.0 * kPi * kPi * (nn - 1.0) * (n1 + 2.0) * (n2 + 2.0));
}

double epsilon_for_lambda(int j1, int j2, double target_lambda) {
    if (j1 < 1 || j2 < 1)
        throw std::invalid_argument("epsilon_for_lambda: integer j1, j2 >= 1 required");
    const int n1 = 2 * j1 + 1, n2 = 2 * j2 + 1;
    const double lmax = lambda_max(n1, n2);
    if (!(target_lambda >= 0.0) || target_lambda >= lmax)
        throw std::domain_error("epsilon_for_lambda: target " + std::to_string(target_lambda) +
                                " outside [0, lambda_max=" + std::to_string(lmax) + ")");
    if (target_lambda == 0.0) return 0.0;

    auto lam = [&](double eps) {
        return lambda_kicked_tops({{j1, 0.0, 0.0}, {j2, 0.0, 0.0}, eps}).lambda;
    };

    // Coarse scan to the first local maximum; step resolves the kappa scale.
    const double sj = std::sqrt(static_cast<double>(j1) * j2);
    const double step = kPi * sj / (4.0 * n1 * n2);
    double e_prev = 0.0, l_prev = 0.0;
    double e_hi = 0.0, l_hi = 0.0;
    for (int k = 1; k < 100000; ++k) {
        const double e = k * step;
        const double l = lam(e);
        if (l < l_prev) { // branch maximum passed
            e_hi = e_prev;
            l_hi = l_prev;
            break;
        }
        if (l >= target_lambda) {
            e_hi = e;
            l_hi = l;
            break;
        }
        e_prev = e;
        l_prev = l;
    }
    if (l_hi < target_lambda)
        throw std::domain_error(
            "epsilon_for_lambda: target " + std::to_string(target_lambda) +
            " exceeds the first-branch maximum " + std::to_string(l_hi) +
            " (coupling saturates before reaching it)");

    double lo = e_prev, hi = e_hi;
    const double tol = 1e-10 * lmax;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double l = lam(mid);
        if (std::abs(l - target_lambda) <= tol) return mid;
        (l < target_lambda ? lo : hi) = mid;
        if (hi - lo <= 1e-16 * hi) break;
    }
    const double e = 0.5 * (lo + hi);
    if (std::abs(lam(e) - target_lambda) > tol)
        throw std::runtime_error("epsilon_for_lambda: bisection failed to reach tolerance");
    return e;
}

} // namespace ktop
