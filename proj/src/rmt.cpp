#include "ktop/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "ktop/coupled_tops.hpp"
#include "ktop/linalg.hpp"
#include "ktop/quadrature.hpp"
#include "ktop/special.hpp"

namespace ktop {

namespace {

template <typename Matrix>
void fix_qr_phases(Matrix& q, const Matrix& r) {
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const auto d = r(i, i);
        const double a = std::abs(d);
        if (a > 0) q.col(i) *= d / a;
    }
}

// 1 - sin^2(pi eps)/(pi eps)^2, stable at small eps.
double one_minus_sinc_sq(double eps) {
    const double x = kPi * eps;
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return x2 * (1.0 / 3.0 + x2 * (-2.0 / 45.0 + x2 * (1.0 / 315.0)));
    }
    const double s = std::sin(x) / x;
    return 1.0 - s * s;
}

// g = 2 chi(pi eps)/(pi eps)^2 and h = 4 Si(pi eps/2)^2/(pi eps)^2; both -> 1.
double g_chi(double eps) {
    const double x = kPi * eps;
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return 1.0 + x2 * (-1.0 / 36.0 + x2 / 1800.0);
    }
    return 2.0 * sine_integral_chi(x) / (x * x);
}

double h_si(double eps) {
    const double x = kPi * eps;
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return 1.0 - x2 / 36.0;
    }
    const double s = sine_integral(0.5 * x);
    return 4.0 * s * s / (x * x);
}

} // namespace

CMatrix haar_unitary(int n, RngStream& stream) {
    CMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            g(i, j) = cxd(stream.gaussian(), stream.gaussian());
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    fix_qr_phases(q, r);
    return q;
}

RMatrix haar_orthogonal(int n, RngStream& stream) {
    RMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = stream.gaussian();
    Eigen::HouseholderQR<RMatrix> qr(g);
    RMatrix q = qr.householderQ() * RMatrix::Identity(n, n);
    RMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    fix_qr_phases(q, r);
    return q;
}

CMatrix sample_cue(int n, RngStream& stream) { return haar_unitary(n, stream); }

CMatrix sample_coe(int n, RngStream& stream) {
    const CMatrix u = haar_unitary(n, stream);
    CMatrix w = u.transpose() * u;
    w = 0.5 * (w + w.transpose()).eval(); // kill roundoff asymmetry
    return w;
}

RVector build_coupling(const EnsembleSpec& spec, RngStream& stream) {
    spec.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(spec.n1) * spec.n2;
    RVector v(n);
    switch (spec.coupling) {
        case CouplingKind::DiagonalPhases:
            for (Eigen::Index i = 0; i < n; ++i)
                v[i] = kTwoPi * stream.uniform_symmetric();
            return v;
        case CouplingKind::ProductPhases: {
            RVector xi(spec.n1), xit(spec.n2);
            for (int j = 0; j < spec.n1; ++j) xi[j] = stream.uniform_symmetric();
            for (int k = 0; k < spec.n2; ++k) xit[k] = stream.uniform_symmetric();
            for (int j = 0; j < spec.n1; ++j)
                for (int k = 0; k < spec.n2; ++k)
                    v[composite_index(j, k, spec.n2)] = kTwoPi * xi[j] * xit[k];
            return v;
        }
        case CouplingKind::KickedTopV12: {
            if (spec.n1 % 2 == 0 || spec.n2 % 2 == 0)
                throw std::invalid_argument(
                    "build_coupling: KickedTopV12 requires odd dimensions (integer spins)");
            return coupling_v12_diagonal((spec.n1 - 1) / 2, (spec.n2 - 1) / 2);
        }
    }
    throw std::logic_error("build_coupling: unknown coupling kind");
}

double lambda_coe_from_invariants(int n1, int n2, double trace_sq, double norm1_sq,
                                  double norm2_sq) {
    const double nn = static_cast<double>(n1) * n2;
    const double bracket =
        nn * (nn + 2.0 * (n1 + n2)) - 2.0 * norm1_sq - 2.0 * norm2_sq - trace_sq;
    return nn * bracket / (4.0 * kPi * kPi * (nn - 1.0) * (n1 + 2.0) * (n2 + 2.0));
}

double lambda_cue_from_invariants(int n1, int n2, double trace_sq, double norm1_sq,
                                  double norm2_sq) {
    const double nn = static_cast<double>(n1) * n2;
    const double bracket = nn * (nn + (n1 + n2)) - norm1_sq - norm2_sq - trace_sq;
    return nn * bracket / (4.0 * kPi * kPi * (nn - 1.0) * (n1 + 1.0) * (n2 + 1.0));
}

double lambda_general(Symmetry sym, const CVector& u12_diagonal, int n1, int n2) {
    if (u12_diagonal.size() != static_cast<Eigen::Index>(n1) * n2)
        throw std::invalid_argument("lambda_general: diagonal size != n1*n2");
    for (Eigen::Index i = 0; i < u12_diagonal.size(); ++i)
        if (std::abs(std::abs(u12_diagonal[i]) - 1.0) > 1e-10)
            throw std::invalid_argument("lambda_general: U12 diagonal is not unitary");

    cxd trace = 0.0;
    double norm1 = 0.0, norm2 = 0.0;
    for (int j = 0; j < n1; ++j) {
        cxd row = 0.0;
        for (int k = 0; k < n2; ++k) row += u12_diagonal[composite_index(j, k, n2)];
        norm1 += std::norm(row);
        trace += row;
    }
    for (int k = 0; k < n2; ++k) {
        cxd col = 0.0;
        for (int j = 0; j < n1; ++j) col += u12_diagonal[composite_index(j, k, n2)];
        norm2 += std::norm(col);
    }
    const double tr2 = std::norm(trace);
    return sym == Symmetry::COE ? lambda_coe_from_invariants(n1, n2, tr2, norm1, norm2)
                                : lambda_cue_from_invariants(n1, n2, tr2, norm1, norm2);
}

double lambda_general(Symmetry sym, const CMatrix& u12, int n1, int n2) {
    if (u12.rows() != u12.cols() || u12.rows() != static_cast<Eigen::Index>(n1) * n2)
        throw std::invalid_argument("lambda_general: U12 must be (n1*n2) square");
    for (Eigen::Index i = 0; i < u12.rows(); ++i)
        for (Eigen::Index j = 0; j < u12.cols(); ++j)
            if (i != j && std::abs(u12(i, j)) > 1e-12)
                throw std::invalid_argument("lambda_general: U12 must be diagonal");
    return lambda_general(sym, u12.diagonal().eval(), n1, n2);
}

double lambda_ensemble_closed_form(Symmetry sym, CouplingKind coupling, int n1, int n2,
                                   double eps, bool small_eps_quadratic) {
    const double nn = static_cast<double>(n1) * n2;
    switch (coupling) {
        case CouplingKind::DiagonalPhases: {
            const double q = one_minus_sinc_sq(eps);
            if (sym == Symmetry::COE) {
                const double d = (n1 + 2.0) * (n2 + 2.0);
                return nn * nn * (d - 9.0) / (4.0 * kPi * kPi * d * (nn - 1.0)) * q;
            }
            const double d = (n1 + 1.0) * (n2 + 1.0);
            return nn * nn * (d - 4.0) / (4.0 * kPi * kPi * d * (nn - 1.0)) * q;
        }
        case CouplingKind::ProductPhases: {
            if (small_eps_quadratic) {
                // Leading order of the full expression below.  (For the COE the
                // numerator combination is (n1+2)(n2+2)-9, the same pattern as
                // the diagonal-phase ensemble.)
                if (sym == Symmetry::COE) {
                    const double d = (n1 + 2.0) * (n2 + 2.0);
                    return eps * eps / 144.0 * nn * nn * (d - 9.0) / ((nn - 1.0) * d);
                }
                const double d = (n1 + 1.0) * (n2 + 1.0);
                return eps * eps / 144.0 * nn * nn * (d - 4.0) / ((nn - 1.0) * d);
            }
            const double g = g_chi(eps);
            const double h = h_si(eps);
            const double tr2 =
                nn * (1.0 + (n1 + n2 - 2.0) * g + (n1 - 1.0) * (n2 - 1.0) * h);
            const double m1 = nn * (1.0 + (n2 - 1.0) * g);
            const double m2 = nn * (1.0 + (n1 - 1.0) * g);
            return sym == Symmetry::COE ? lambda_coe_from_invariants(n1, n2, tr2, m1, m2)
                                        : lambda_cue_from_invariants(n1, n2, tr2, m1, m2);
        }
        case CouplingKind::KickedTopV12: {
            if (n1 % 2 == 0 || n2 % 2 == 0)
                throw std::invalid_argument(
                    "lambda_ensemble_closed_form: KickedTopV12 requires odd dimensions");
            CoupledTopParams p{{(n1 - 1) / 2, 0.0, 0.0}, {(n2 - 1) / 2, 0.0, 0.0}, eps};
            LambdaReport rep = lambda_kicked_tops(p, LambdaMethod::ExactSum);
            if (sym == Symmetry::CUE)
                return lambda_cue_from_invariants(n1, n2, rep.trace_sq, rep.norm1_sq,
                                                  rep.norm2_sq);
            return rep.lambda;
        }
    }
    throw std::logic_error("lambda_ensemble_closed_form: unknown coupling kind");
}

double omega_density(Symmetry sym, CouplingKind coupling, double w) {
    if (!(w > 0.0)) throw std::domain_error("omega_density: requires w > 0");
    const bool product = coupling != CouplingKind::DiagonalPhases;
    if (sym == Symmetry::COE)
        return product ? bessel_k0(std::sqrt(w)) / (kPi * std::sqrt(w))
                       : std::exp(-0.5 * w) / std::sqrt(kTwoPi * w);
    return product ? 2.0 * bessel_k0(2.0 * std::sqrt(w)) : std::exp(-w);
}

namespace {

// Cumulative table for the product-coupling densities in u = sqrt(omega).
class ProductOmegaCdf {
  public:
    explicit ProductOmegaCdf(bool coe) {
        // integrand in u: COE (2/pi) K0(u); CUE 4 u K0(2u).  Geometric grid
        // resolves the logarithmic endpoint.
        auto f = [coe](double u) {
            return coe ? 2.0 / kPi * bessel_k0(u) : 4.0 * u * bessel_k0(2.0 * u);
        };
        us_.push_back(0.0);
        cums_.push_back(0.0);
        const QuadratureSpec spec{1e-12, 1e-15, 400};
        double cum = 0.0, prev = 0.0;
        for (double u = 1e-8; u < 65.0; u *= 1.12) {
            cum += integrate_1d(f, prev, u, spec).value;
            us_.push_back(u);
            cums_.push_back(cum);
            prev = u;
        }
        f_ = f;
    }

    double eval(double w) const {
        if (w <= 0.0) return 0.0;
        const double u = std::sqrt(w);
        if (u >= us_.back()) return 1.0;
        const auto it = std::upper_bound(us_.begin(), us_.end(), u);
        const std::size_t k = static_cast<std::size_t>(it - us_.begin()) - 1;
        const QuadratureSpec spec{1e-12, 1e-15, 400};
        return std::min(1.0, cums_[k] + integrate_1d(f_, us_[k], u, spec).value);
    }

  private:
    std::vector<double> us_, cums_;
    std::function<double(double)> f_;
};

} // namespace

std::function<double(double)> omega_cdf(Symmetry sym, CouplingKind coupling) {
    const bool product = coupling != CouplingKind::DiagonalPhases;
    if (!product) {
        if (sym == Symmetry::COE)
            return [](double w) { return w <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * w)); };
        return [](double w) { return w <= 0.0 ? 0.0 : -std::expm1(-w); };
    }
    static std::mutex mu;
    static std::map<bool, std::shared_ptr<ProductOmegaCdf>> cache;
    std::shared_ptr<ProductOmegaCdf> table;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = cache[sym == Symmetry::COE];
        if (!slot) slot = std::make_shared<ProductOmegaCdf>(sym == Symmetry::COE);
        table = slot;
    }
    return [table](double w) { return table->eval(w); };
}

namespace {

// Factor the coupling diagonal as v_{jk} = a_j b_k where possible; consumes
// the stream exactly like build_coupling does for the same kind.
bool coupling_factors(const EnsembleSpec& spec, RngStream& stream, RVector& a, RVector& b) {
    switch (spec.coupling) {
        case CouplingKind::DiagonalPhases:
            return false;
        case CouplingKind::ProductPhases:
            a.resize(spec.n1);
            b.resize(spec.n2);
            for (int j = 0; j < spec.n1; ++j) a[j] = kTwoPi * stream.uniform_symmetric();
            for (int k = 0; k < spec.n2; ++k) b[k] = stream.uniform_symmetric();
            return true;
        case CouplingKind::KickedTopV12: {
            if (spec.n1 % 2 == 0 || spec.n2 % 2 == 0)
                throw std::invalid_argument(
                    "coupling_factors: KickedTopV12 requires odd dimensions");
            const int j1 = (spec.n1 - 1) / 2, j2 = (spec.n2 - 1) / 2;
            a.resize(spec.n1);
            b.resize(spec.n2);
            const double scale = 1.0 / std::sqrt(static_cast<double>(j1) * j2);
            for (int i = 0; i < spec.n1; ++i) a[i] = (j1 - i) * scale;
            for (int i = 0; i < spec.n2; ++i) b[i] = j2 - i;
            return true;
        }
    }
    throw std::logic_error("coupling_factors: unknown coupling kind");
}

} // namespace

std::vector<double> offdiag_element_samples(const EnsembleSpec& spec,
                                            int pairs_per_realization, bool full_pairs) {
    spec.validate();
    const int n1 = spec.n1, n2 = spec.n2;
    const Eigen::Index nn = static_cast<Eigen::Index>(n1) * n2;
    const bool coe = spec.symmetry == Symmetry::COE;

    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(spec.realizations) *
                    (full_pairs ? static_cast<std::size_t>(nn * (nn - 1))
                                : static_cast<std::size_t>(pairs_per_realization)));

    for (int r = 0; r < spec.realizations; ++r) {
        RngStream stream(spec.base_seed, static_cast<std::uint64_t>(r));
        RVector a, b, v;
        const bool product_structure = coupling_factors(spec, stream, a, b);
        if (!product_structure) v = build_coupling(spec, stream);

        CMatrix e1, e2;
        if (coe) {
            e1 = haar_orthogonal(n1, stream).cast<cxd>();
            e2 = haar_orthogonal(n2, stream).cast<cxd>();
        } else {
            e1 = haar_unitary(n1, stream);
            e2 = haar_unitary(n2, stream);
        }

        double mean_sq = 0.0; // exact per-realization mean square off-diagonal
        CMatrix m1, m2;       // product structure: Gamma = m1 (x) m2
        if (product_structure) {
            m1 = e1.adjoint() * (a.cast<cxd>().asDiagonal() * e1);
            m2 = e2.adjoint() * (b.cast<cxd>().asDiagonal() * e2);
            const double f1 = m1.squaredNorm(), f2 = m2.squaredNorm();
            double d1 = 0.0, d2 = 0.0;
            for (int i = 0; i < n1; ++i) d1 += std::norm(m1(i, i));
            for (int i = 0; i < n2; ++i) d2 += std::norm(m2(i, i));
            mean_sq = (f1 * f2 - d1 * d2) / (static_cast<double>(nn) * (nn - 1));
        } else {
            // gamma_ii = (A1^T Vm A2)_{i1 i2} with A = |E|^2 elementwise
            RMatrix a1 = e1.cwiseAbs2(), a2 = e2.cwiseAbs2();
            RMatrix vm(n1, n2);
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2; ++k) vm(j, k) = v[composite_index(j, k, n2)];
            RMatrix diag = a1.transpose() * vm * a2;
            const double total = v.squaredNorm();
            mean_sq = (total - diag.squaredNorm()) / (static_cast<double>(nn) * (nn - 1));
        }
        if (mean_sq <= 0.0) continue;

        auto element = [&](Eigen::Index i, Eigen::Index l) -> double {
            const int i1 = static_cast<int>(i / n2), i2 = static_cast<int>(i % n2);
            const int l1 = static_cast<int>(l / n2), l2 = static_cast<int>(l % n2);
            if (product_structure) return std::norm(m1(i1, l1)) * std::norm(m2(i2, l2));
            cxd acc = 0.0;
            for (int k1 = 0; k1 < n1; ++k1) {
                cxd inner = 0.0;
                for (int k2 = 0; k2 < n2; ++k2)
                    inner += std::conj(e2(k2, i2)) * e2(k2, l2) *
                             v[composite_index(k1, k2, n2)];
                acc += std::conj(e1(k1, i1)) * e1(k1, l1) * inner;
            }
            return std::norm(acc);
        };

        if (full_pairs) {
            for (Eigen::Index i = 0; i < nn; ++i)
                for (Eigen::Index l = 0; l < nn; ++l)
                    if (i != l) samples.push_back(element(i, l) / mean_sq);
        } else {
            for (int s = 0; s < pairs_per_realization; ++s) {
                const Eigen::Index i = static_cast<Eigen::Index>(stream.uniform_below(nn));
                Eigen::Index l = static_cast<Eigen::Index>(stream.uniform_below(nn - 1));
                if (l >= i) ++l;
                samples.push_back(element(i, l) / mean_sq);
            }
        }
    }

    // Global rescale to exact unit sample mean (the definition of omega).
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    if (mean > 0.0)
        for (double& s : samples) s /= mean;
    return samples;
}

std::vector<FourthMomentSample> eigvec_fourth_moments(Symmetry sym, int n, int draws,
                                                      std::uint64_t seed) {
    std::vector<FourthMomentSample> out(static_cast<std::size_t>(draws));
    for (int d = 0; d < draws; ++d) {
        RngStream stream(seed, static_cast<std::uint64_t>(d));
        const CMatrix u =
            sym == Symmetry::COE ? sample_coe(n, stream) : sample_cue(n, stream);
        const CMatrix& e = eig_unitary(u).vectors;
        const RMatrix p = e.cwiseAbs2();
        double diag = 0.0, off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                diag += p(i, k) * p(i, k);
                for (int l = 0; l < n; ++l)
                    if (l != k) off += p(i, k) * p(i, l);
            }
        out[d].diag_mean = diag / (static_cast<double>(n) * n);
        out[d].offdiag_mean = off / (static_cast<double>(n) * n * (n - 1));
    }
    return out;
}

} // namespace ktop
