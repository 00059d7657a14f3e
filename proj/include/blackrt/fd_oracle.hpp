#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "blackrt/rt_transform.hpp"

namespace blackrt {

enum class FDScheme { explicit_euler, semi_implicit };

struct FDConfig {
    double x_max = 50.0;
    std::size_t nx = 512;  // x intervals of the output grid; nodes 0..nx
    std::size_t nt = 512;  // time-to-horizon intervals
    FDScheme scheme = FDScheme::semi_implicit;
    double lambda_sq = 1.0;
    double horizon = 1.0;
    // Coefficient refreezes per implicit step (1 = plain frozen-coefficient).
    int coefficient_sweeps = 1;
    // R(x); solve_F squares it itself. The semi-implicit path samples it on
    // a window padded a few decades beyond [0, x_max], so the callable must
    // be total there (continue tabulated data linearly past their range).
    std::function<double(double)> terminal;
};

// Marching solution of r_tau = (|lambda|^2/2) r^2 r_xx, tau = T - t, with
// r(0, tau) = 0 and asymptotic linearity (r_xx -> 0) at the far truncation.
//
// The semi-implicit scheme advances u = r/x on a uniform mesh in xi = log x
// (u_tau = (|lambda|^2/2) u^2 (u_xixi + u_xi), uniformly parabolic with
// exponentially flat tails at both ends), padded several decades past the
// output window so the frozen-tail closure error is negligible; the surface
// is then sampled back onto the uniform x grid. The explicit scheme runs
// directly on the uniform x grid under the stability bound
// dtau <= dx^2 / (|lambda|^2 max r^2), checked at every step.
RTSurface solve_black(const FDConfig& config);

// Companion solution of the squared field F = r^2:
// F_tau = (|lambda|^2/2) F F_xx - (|lambda|^2/4) F_x^2, F(0) = 0.
// Internally advances v = F/x^2 = u^2 on the same log mesh
// (v_tau = (|lambda|^2/2) v (v_xixi + v_xi) - (|lambda|^2/4) v_xi^2), with
// the gradient term central and explicit.
struct FSurface {
    std::vector<double> x_grid;
    std::vector<double> t_grid;  // ascending, ends at the horizon
    std::vector<double> values;  // [ti * nx + xi]
    double lambda_sq = 0.0;

    double value(std::size_t xi, std::size_t ti) const { return values[ti * x_grid.size() + xi]; }
    // sqrt(F) reassembled as a risk-tolerance surface for cross-checks.
    RTSurface sqrt_surface(const MarketParams& market) const;
};
FSurface solve_F(const FDConfig& config);

}  // namespace blackrt
