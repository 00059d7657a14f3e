#pragma once

#include <functional>
#include <span>
#include <utility>

#include "blackrt/gauss_hermite.hpp"
#include "blackrt/market.hpp"
#include "blackrt/preferences.hpp"

namespace blackrt {

enum class HeatEvaluator { closed_form, quadrature };

struct QuadratureParams {
    std::size_t order = 128;
    // Order-n vs order-2n agreement demanded at construction probes.
    double self_check_tol = 1e-9;
};

// H(z,t) and its first three z-derivatives, solving the terminal-value heat
// equation H_t + (|lambda|^2 / 2) H_zz = 0 with H(z,T) = I(e^{-z}).
// Exponential sums evaluate in closed form (log-space); everything else goes
// through Gauss-Hermite quadrature of the terminal datum, with derivatives
// taken on the datum itself rather than on quadrature output.
// Immutable and safe for concurrent evaluation.
class HeatSurface {
public:
    // Picks closed_form for atomic specs, quadrature for analytic ones.
    HeatSurface(UtilitySpec spec, MarketParams market);
    HeatSurface(UtilitySpec spec, MarketParams market, HeatEvaluator kind, QuadratureParams qp = {});

    // d^order H / dz^order at (z,t), order 0..3, t in [0, T].
    double eval(double z, double t, int order = 0) const;

    // log of the same quantity; exact in log space for atomic specs, so it
    // stays finite where eval would overflow. Orders whose value can be
    // negative (order 3 of a general datum) are rejected.
    double log_eval(double z, double t, int order = 0) const;

    const UtilitySpec& spec() const { return spec_; }
    const MarketParams& market() const { return market_; }
    HeatEvaluator evaluator() const { return kind_; }
    std::size_t quadrature_order() const { return rule_.nodes.size(); }

    // [z_lo, z_hi] with H(z_lo, t) < x_lo/10 and H(z_hi, t) > 10 x_hi for
    // every t in [0,T]; exists by the full-range property, found by
    // adaptive expansion.
    std::pair<double, double> z_bracket(double x_lo, double x_hi) const;

    struct RatioReport {
        double n1, N1;  // bounds of H_z / H
        double n2, N2;  // bounds of H_zz / H_z
        double N3;      // bound of |H_zzz| / |H_zz|
        bool all_finite = true;
        double bad_z = 0.0, bad_t = 0.0;  // first non-finite ratio location
        // Set when the spec could not be certified against the standing
        // conditions; the constants are then informational only.
        bool advisory = false;
    };
    RatioReport derivative_ratios(std::span<const double> z_grid, std::span<const double> t_grid) const;

private:
    void check_construction() const;
    double quad_eval(double z, double t, int order) const;
    double closed_log_eval(double z, double t, int order) const;

    UtilitySpec spec_;
    MarketParams market_;
    HeatEvaluator kind_;
    GaussHermiteRule rule_;
};

inline double eval_H(const HeatSurface& surface, double z, double t, int order = 0) {
    return surface.eval(z, t, order);
}

// Heat evolution of an arbitrary positive terminal datum (generic caller for
// log-curvature experiments; the datum need not come from a utility).
double heat_evolve(const std::function<double(double)>& terminal, const MarketParams& market, double z,
                   double t, const GaussHermiteRule& rule);

}  // namespace blackrt
