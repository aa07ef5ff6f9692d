#include "complab/quadrature.hpp"

#include <algorithm>

namespace complab {

namespace {

struct Panel {
    double a, b, fa, fm, fb, whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth) {
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(p.a, m, p.fa, flm, p.fm);
    const double right = simpson(m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return refine(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
           refine(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                        double abs_floor, int max_depth) {
    if (!(b > a)) {
        return 0.0;
    }
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(a, b, fa, fm, fb);
    // a coarse first pass sets the scale for the relative tolerance
    const double scale = std::abs(refine(f, {a, b, fa, fm, fb, whole}, std::abs(whole) * 1e-3 + abs_floor, 6));
    const double tol = std::max(rel_tol * scale, abs_floor);
    return refine(f, {a, b, fa, fm, fb, whole}, tol, max_depth);
}

}  // namespace complab
