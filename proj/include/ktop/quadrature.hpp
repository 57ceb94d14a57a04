#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace ktop {

struct QuadratureSpec {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 2000;

    void validate() const {
        if (relative_tolerance <= 0 || absolute_tolerance <= 0)
            throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
        if (max_subdivisions < 1)
            throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
};

// Thrown when the adaptive scheme cannot reach the requested tolerance.
// Integration never returns a silently inaccurate value.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureResult {
    double value = 0.0;
    double error_bound = 0.0;
};

// Adaptive Gauss-Kronrod 15(7) on a finite interval.  Integrable endpoint
// singularities up to t^(-1/2) should be removed by the caller via t = u^2
// before calling (the panels converge too slowly otherwise).
QuadratureResult integrate_1d(const std::function<double(double)>& f,
                              double a, double b, const QuadratureSpec& spec = {});

struct Rect {
    double x0, x1, y0, y1;
};

// Iterated 1-d quadrature over an axis-aligned rectangle; the inner integral
// runs at a tightened tolerance so the outer error estimate stays meaningful.
QuadratureResult integrate_2d(const std::function<double(double, double)>& f,
                              const Rect& rect, const QuadratureSpec& spec = {});

} // namespace ktop
