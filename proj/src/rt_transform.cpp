#include "blackrt/rt_transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "blackrt/numeric.hpp"
#include "blackrt/parallel.hpp"
#include "blackrt/root_finding.hpp"

namespace blackrt {

double invert_H(const HeatSurface& surface, double x, double t) {
    if (!(x > 0.0)) throw std::invalid_argument("invert_H: x must be positive");
    auto [z_lo, z_hi] = surface.z_bracket(x, x);
    const double target = std::log(x);
    // The bracket is generous by construction; tighten defensively anyway.
    int guard = 0;
    while (!(surface.log_eval(z_lo, t, 0) < target)) {
        z_lo = 2.0 * z_lo - z_hi;
        if (++guard > 200) throw std::runtime_error("invert_H: bracket expansion failed (left)");
    }
    guard = 0;
    while (!(surface.log_eval(z_hi, t, 0) > target)) {
        z_hi = 2.0 * z_hi - z_lo;
        if (++guard > 200) throw std::runtime_error("invert_H: bracket expansion failed (right)");
    }
    // Steeply decaying data underflow on the far left; pull the lower end up
    // to where log H is representable so the iteration sees finite values.
    guard = 0;
    while (!std::isfinite(surface.log_eval(z_lo, t, 0))) {
        const double mid = 0.5 * (z_lo + z_hi);
        if (surface.log_eval(mid, t, 0) < target)
            z_lo = mid;
        else
            z_hi = mid;
        if (++guard > 500) throw std::runtime_error("invert_H: bracket degenerated in an underflow region");
    }
    // Newton on log H(z,t) - log x; derivative H_z/H stays well scaled.
    return newton_bisect([&](double z) { return surface.log_eval(z, t, 0) - target; },
                         [&](double z) { return std::exp(surface.log_eval(z, t, 1) - surface.log_eval(z, t, 0)); },
                         z_lo, z_hi, 1e-13);
}

RTPoint eval_r(const HeatSurface& surface, double x, double t) {
    const double z = invert_H(surface, x, t);
    const double h1 = surface.eval(z, t, 1);
    const double h2 = surface.eval(z, t, 2);
    const double h3 = surface.eval(z, t, 3);
    RTPoint p;
    p.r = h1;
    p.r_x = h2 / h1;
    p.r_xx = (h3 / h1 - (h2 / h1) * (h2 / h1)) / h1;
    return p;
}

RelativeRTPoint eval_relative_r(const HeatSurface& surface, double x, double t) {
    const RTPoint p = eval_r(surface, x, t);
    RelativeRTPoint q;
    q.rt = p.r / x;
    q.rt_x = (p.r_x - q.rt) / x;
    q.rt_xx = p.r_xx / x - 2.0 * p.r_x / (x * x) + 2.0 * p.r / (x * x * x);
    return q;
}

double eval_gamma(const HeatSurface& surface, double x, double t) { return 1.0 / eval_r(surface, x, t).r; }

double eval_G(const HeatSurface& surface, double z, double t) {
    const double h1 = surface.eval(z, t, 1);
    const double h2 = surface.eval(z, t, 2);
    const double h3 = surface.eval(z, t, 3);
    if (h2 == 0.0)
        throw std::runtime_error("eval_G: H_zz vanishes at (z=" + format_double(z) + ", t=" + format_double(t) + ")");
    return h3 / h2 - h2 / h1;
}

namespace {

// Clamped central step in t so that t +/- ht stays inside [0, T].
double time_step(const MarketParams& market, double t, double ht_rel) {
    const double T = market.horizon();
    double ht = ht_rel * T;
    ht = std::min(ht, t);
    ht = std::min(ht, T - t);
    if (!(ht > 0.0)) throw std::invalid_argument("residual meter: t must be interior to [0, T]");
    return ht;
}

}  // namespace

double black_residual_pointwise(const HeatSurface& surface, double x, double t, ResidualSteps steps) {
    const double hx = steps.hx_rel * x;
    const double ht = time_step(surface.market(), t, steps.ht_rel);
    const double r0 = eval_r(surface, x, t).r;
    const double r_t = (eval_r(surface, x, t + ht).r - eval_r(surface, x, t - ht).r) / (2.0 * ht);
    const double r_xx =
        (eval_r(surface, x + hx, t).r - 2.0 * r0 + eval_r(surface, x - hx, t).r) / (hx * hx);
    return r_t + 0.5 * surface.market().lambda_sq() * r0 * r0 * r_xx;
}

double burgers_residual(const HeatSurface& surface, double x, double t, ResidualSteps steps) {
    // The equation holds along the heat parametrization: with
    // w(z,t) = rtilde(H(z,t), t), check w_t + (l2/2) w_zz + l2 w w_z.
    const double z = invert_H(surface, x, t);
    const double lsq = surface.market().lambda_sq();
    const double hz = std::max(steps.hx_rel, 1e-6);
    const double ht = time_step(surface.market(), t, steps.ht_rel);
    auto w = [&](double zz, double tt) {
        return eval_relative_r(surface, surface.eval(zz, tt, 0), tt).rt;
    };
    const double w0 = w(z, t);
    const double w_t = (w(z, t + ht) - w(z, t - ht)) / (2.0 * ht);
    const double w_z = (w(z + hz, t) - w(z - hz, t)) / (2.0 * hz);
    const double w_zz = (w(z + hz, t) - 2.0 * w0 + w(z - hz, t)) / (hz * hz);
    return w_t + 0.5 * lsq * w_zz + lsq * w0 * w_z;
}

double pme_residual(const HeatSurface& surface, double x, double t, ResidualSteps steps) {
    const double hx = steps.hx_rel * x;
    const double ht = time_step(surface.market(), t, steps.ht_rel);
    const double g_t = (eval_gamma(surface, x, t + ht) - eval_gamma(surface, x, t - ht)) / (2.0 * ht);
    const double inv_xx = (eval_r(surface, x + hx, t).r - 2.0 * eval_r(surface, x, t).r +
                           eval_r(surface, x - hx, t).r) /
                          (hx * hx);
    return g_t - 0.5 * surface.market().lambda_sq() * inv_xx;
}

RTSurface RTSurface::from_transform(const HeatSurface& surface, std::vector<double> x_grid,
                                    std::vector<double> t_grid) {
    if (x_grid.empty() || t_grid.empty()) throw std::invalid_argument("RTSurface: empty grid");
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (!(x_grid[i] > x_grid[i - 1])) throw std::invalid_argument("RTSurface: x grid must ascend");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("RTSurface: t grid must ascend");
    if (!(x_grid.front() > 0.0)) throw std::invalid_argument("RTSurface: transform grid needs x > 0");

    RTSurface s;
    s.x_grid_ = std::move(x_grid);
    s.t_grid_ = std::move(t_grid);
    s.prov_ = Provenance::transform;
    s.market_ = surface.market();
    const std::size_t nx = s.x_grid_.size(), nt = s.t_grid_.size();
    s.r_.assign(nx * nt, 0.0);
    s.rx_.assign(nx * nt, 0.0);
    s.rxx_.assign(nx * nt, 0.0);
    parallel_for(nx * nt, [&](std::size_t k) {
        const std::size_t ti = k / nx, xi = k % nx;
        const RTPoint p = eval_r(surface, s.x_grid_[xi], s.t_grid_[ti]);
        s.r_[k] = p.r;
        s.rx_[k] = p.r_x;
        s.rxx_[k] = p.r_xx;
    });
    return s;
}

RTSurface RTSurface::from_grid(std::vector<double> x_grid, std::vector<double> t_grid,
                               std::vector<double> r_values, Provenance prov, MarketParams market) {
    if (x_grid.size() < 3 || t_grid.size() < 2) throw std::invalid_argument("RTSurface: grid too small");
    if (r_values.size() != x_grid.size() * t_grid.size())
        throw std::invalid_argument("RTSurface: value array does not match the grid");
    // The stored derivative reconstructions assume uniform spacing.
    const double dx0 = x_grid[1] - x_grid[0];
    for (std::size_t i = 1; i + 1 < x_grid.size(); ++i)
        if (std::abs((x_grid[i + 1] - x_grid[i]) - dx0) > 1e-9 * std::max(1.0, std::abs(dx0)))
            throw std::invalid_argument("RTSurface: sampled grids must be uniform in x");
    RTSurface s;
    s.x_grid_ = std::move(x_grid);
    s.t_grid_ = std::move(t_grid);
    s.r_ = std::move(r_values);
    s.prov_ = prov;
    s.market_ = std::move(market);
    const std::size_t nx = s.x_grid_.size(), nt = s.t_grid_.size();
    s.rx_.assign(nx * nt, 0.0);
    s.rxx_.assign(nx * nt, 0.0);
    const double dx = s.x_grid_[1] - s.x_grid_[0];
    for (std::size_t ti = 0; ti < nt; ++ti) {
        for (std::size_t xi = 0; xi < nx; ++xi) {
            const std::size_t k = s.idx(xi, ti);
            if (xi == 0) {
                s.rx_[k] = (-3.0 * s.r_[k] + 4.0 * s.r_[s.idx(1, ti)] - s.r_[s.idx(2, ti)]) / (2.0 * dx);
                s.rxx_[k] = (s.r_[k] - 2.0 * s.r_[s.idx(1, ti)] + s.r_[s.idx(2, ti)]) / (dx * dx);
            } else if (xi == nx - 1) {
                s.rx_[k] = (3.0 * s.r_[k] - 4.0 * s.r_[s.idx(nx - 2, ti)] + s.r_[s.idx(nx - 3, ti)]) / (2.0 * dx);
                s.rxx_[k] = (s.r_[k] - 2.0 * s.r_[s.idx(nx - 2, ti)] + s.r_[s.idx(nx - 3, ti)]) / (dx * dx);
            } else {
                s.rx_[k] = (s.r_[s.idx(xi + 1, ti)] - s.r_[s.idx(xi - 1, ti)]) / (2.0 * dx);
                s.rxx_[k] = (s.r_[s.idx(xi + 1, ti)] - 2.0 * s.r_[k] + s.r_[s.idx(xi - 1, ti)]) / (dx * dx);
            }
        }
    }
    return s;
}

double RTSurface::r_t(std::size_t xi, std::size_t ti) const {
    const std::size_t nt = t_grid_.size();
    if (nt < 3) throw std::logic_error("RTSurface: time grid too small for differences");
    if (ti > 0 && ti + 1 < nt) {
        const double dt = t_grid_[ti + 1] - t_grid_[ti - 1];
        return (r(xi, ti + 1) - r(xi, ti - 1)) / dt;
    }
    if (ti == 0) {
        const double dt = t_grid_[1] - t_grid_[0];
        return (-3.0 * r(xi, 0) + 4.0 * r(xi, 1) - r(xi, 2)) / (2.0 * dt);
    }
    const double dt = t_grid_[nt - 1] - t_grid_[nt - 2];
    return (3.0 * r(xi, nt - 1) - 4.0 * r(xi, nt - 2) + r(xi, nt - 3)) / (2.0 * dt);
}

double RTSurface::black_residual(std::size_t xi, std::size_t ti) const {
    if (ti == 0 || ti + 1 >= t_grid_.size() || xi == 0 || xi + 1 >= x_grid_.size())
        throw std::invalid_argument("black_residual: boundary index");
    const double rv = r(xi, ti);
    return r_t(xi, ti) + 0.5 * market_.lambda_sq() * rv * rv * r_xx(xi, ti);
}

EmpiricalBounds RTSurface::empirical_bounds() const {
    EmpiricalBounds b{};
    b.k0 = b.k1 = b.m_rt = std::numeric_limits<double>::infinity();
    b.K0 = b.K1 = b.K2 = b.K_r_rxx = b.K_rsq_xx = b.M_rt = 0.0;
    // |r_t|/x is reported only where the time derivative is resolved above
    // grid noise; it degenerates on linear fixtures.
    const double rt_floor = 1e-9;
    for (std::size_t ti = 0; ti < nt(); ++ti) {
        for (std::size_t xi = 0; xi < nx(); ++xi) {
            const double x = x_grid_[xi];
            if (!(x > 0.0)) continue;
            const double rv = r(xi, ti);
            const double rxv = r_x(xi, ti);
            const double rxxv = r_xx(xi, ti);
            b.k0 = std::min(b.k0, rv / x);
            b.K0 = std::max(b.K0, rv / x);
            b.k1 = std::min(b.k1, rxv);
            b.K1 = std::max(b.K1, rxv);
            b.K2 = std::max(b.K2, std::abs(x * rxxv));
            b.K_r_rxx = std::max(b.K_r_rxx, std::abs(rv * rxxv));
            b.K_rsq_xx = std::max(b.K_rsq_xx, std::abs(2.0 * (rxv * rxv + rv * rxxv)));
            const double rt = r_t(xi, ti);
            if (std::abs(rt) > rt_floor) {
                b.m_rt = std::min(b.m_rt, std::abs(rt) / x);
                b.M_rt = std::max(b.M_rt, std::abs(rt) / x);
            }
        }
    }
    return b;
}

}  // namespace blackrt
