#include "ktop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace ktop {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] (QUADPACK dqk15), with the
// embedded 7-point Gauss rule for the error estimate.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double wgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double res_g = fc * wg[3];
    double res_k = fc * wgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        res_k += wgk[j] * fsum;
        if (j % 2 == 1) res_g += wg[j / 2] * fsum;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = res_k * h;
    const double diff = std::abs((res_k - res_g) * h);
    // QUADPACK-style sharpened estimate: (200*diff)^1.5 capped by diff.
    p.error = diff;
    if (diff > 0) p.error = std::min(diff, std::pow(200.0 * diff, 1.5));
    return p;
}

} // namespace

QuadratureResult integrate_1d(const std::function<double(double)>& f,
                              double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (a == b) return {0.0, 0.0};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::priority_queue<Panel> panels;
    panels.push(gk15(f, a, b));
    double total = panels.top().value;
    double err = panels.top().error;
    int splits = 0;

    auto tol = [&](double t) {
        return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(t));
    };

    while (err > tol(total)) {
        if (splits >= spec.max_subdivisions)
            throw QuadratureError("integrate_1d: no convergence after " +
                                  std::to_string(spec.max_subdivisions) +
                                  " subdivisions (err=" + std::to_string(err) + ")");
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureError("integrate_1d: interval collapsed below machine resolution");
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++splits;
    }

    if (!std::isfinite(total))
        throw QuadratureError("integrate_1d: non-finite integral value");
    return {sign * total, err};
}

QuadratureResult integrate_2d(const std::function<double(double, double)>& f,
                              const Rect& rect, const QuadratureSpec& spec) {
    spec.validate();
    QuadratureSpec inner = spec;
    inner.relative_tolerance = std::max(spec.relative_tolerance * 0.1, 1e-14);
    inner.absolute_tolerance = std::max(spec.absolute_tolerance * 0.1, 1e-15);

    double inner_err = 0.0;
    auto outer = [&](double y) {
        QuadratureResult r =
            integrate_1d([&](double x) { return f(x, y); }, rect.x0, rect.x1, inner);
        inner_err = std::max(inner_err, r.error_bound);
        return r.value;
    };
    QuadratureResult r = integrate_1d(outer, rect.y0, rect.y1, spec);
    r.error_bound += inner_err * std::abs(rect.y1 - rect.y0);
    return r;
}

} // namespace ktop
