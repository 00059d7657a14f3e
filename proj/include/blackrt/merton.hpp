#pragma once

#include <vector>

#include "blackrt/heat_engine.hpp"
#include "blackrt/rt_transform.hpp"

namespace blackrt {

// Marginal value u_x(x,t) = exp(-z - (|lambda|^2/2)(T-t)) at z = invert_H(x,t).
double eval_u_x(const HeatSurface& surface, double x, double t);

struct PolicySample {
    double x;
    double t;
    double r;                 // risk tolerance at (x,t)
    std::vector<double> pi;   // per-asset amounts
    double total;             // sum of risky amounts
};

// First-order optimum of the dynamic program: sigma pi = lambda r(x,t).
PolicySample eval_policy(const HeatSurface& surface, const MarketParams& market, double x, double t);

// Value function via the martingale representation
//   u(x,t) = E[ (U o I)(exp(-(z + |lambda|^2 s + |lambda| sqrt(s) xi))) ],
// s = T - t, z = invert_H(x,t). Exact in closed form for atomic specs; the
// composite U o I is integrated from the identity (U o I)' (q) = q I'(q)
// otherwise. Defined up to one global constant, so time differences are
// meaningful.
double value_function(const HeatSurface& surface, double x, double t);

// u_t + (|lambda|^2/2) u_x r with u_t by central time differences of
// value_function; vanishes at second order in the step.
double hjb_residual(const HeatSurface& surface, double x, double t, double ht_rel = 1e-3);

}  // namespace blackrt
