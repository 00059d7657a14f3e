#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace blackrt {

// Root of f on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
// Newton steps using df, falling back to bisection whenever the Newton
// iterate leaves the bracket or stalls (Press et al. style).
template <typename F, typename DF>
double newton_bisect(F&& f, DF&& df, double lo, double hi, double xtol, int max_iter = 100) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("newton_bisect: root not bracketed on [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]");
    if (flo > 0.0) std::swap(lo, hi);  // orient so f(lo) < 0
    double x = 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;
    double fx = f(x);
    double dfx = df(x);
    for (int it = 0; it < max_iter; ++it) {
        const bool newton_out = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        const bool too_slow = std::abs(2.0 * fx) > std::abs(dx_old * dfx);
        const bool degenerate = dfx == 0.0 || !std::isfinite(fx) || !std::isfinite(dfx);
        if (newton_out || too_slow || degenerate) {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x -= dx;
        }
        if (std::abs(dx) <= xtol * std::max(1.0, std::abs(x))) return x;
        fx = f(x);
        dfx = df(x);
        if (fx == 0.0) return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
    }
    return x;
}

}  // namespace blackrt
