#pragma once

#include <cmath>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "semsense/errors.hpp"

namespace semsense {

// Adaptive Gauss-Kronrod integration on [a, b] against an absolute error
// target. Throws quadrature-failure when the refinement budget is exhausted
// before the estimated error drops below abs_tol.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol, int max_depth = 15) {
    if (!(b > a)) {
        return 0.0;
    }
    double err = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, max_depth, 1e-13, &err);
    if (!std::isfinite(value) || err > abs_tol) {
        throw Error(Errc::quadrature_failure,
                    "estimated error " + std::to_string(err) + " above tolerance " +
                        std::to_string(abs_tol));
    }
    return value;
}

} // namespace semsense
