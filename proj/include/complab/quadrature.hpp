#pragma once

#include <cmath>
#include <functional>

namespace complab {

/// Adaptive Simpson quadrature of f on [a, b] with Richardson correction.
/// Stops refining an interval once the local error estimate is below its
/// share of rel_tol * |integral estimate| (or abs_floor), or at max_depth.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-9, double abs_floor = 1e-15, int max_depth = 50);

}  // namespace complab
