#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blackrt/heat_engine.hpp"

namespace blackrt {

// Unique z with H(z,t) = x, to relative 1e-12. Expands the initial bracket
// if the adaptive domain was too tight, up to a cap.
double invert_H(const HeatSurface& surface, double x, double t);

struct RTPoint {
    double r;
    double r_x;
    double r_xx;
};

// Risk tolerance and spatial derivatives through the transform:
// r = H_z, r_x = H_zz/H_z, r_xx = (H_zzz/H_z - (H_zz/H_z)^2)/H_z at
// z = invert_H(x,t).
RTPoint eval_r(const HeatSurface& surface, double x, double t);

struct RelativeRTPoint {
    double rt;
    double rt_x;
    double rt_xx;
};

// r/x and its derivatives (chain rule on eval_r).
RelativeRTPoint eval_relative_r(const HeatSurface& surface, double x, double t);

// Risk aversion 1/r.
double eval_gamma(const HeatSurface& surface, double x, double t);

// Shape indicator G = H_zzz/H_zz - H_zz/H_z; shares the sign of r_xx at
// x = H(z,t). Rejects vanishing H_zz.
double eval_G(const HeatSurface& surface, double z, double t);

struct ResidualSteps {
    // Relative to x (resp. the horizon); the residual meters use central
    // differences at these scales.
    double hx_rel = 1e-3;
    double ht_rel = 1e-3;
};

// r_t + (|lambda|^2/2) r^2 r_xx from order-0 evaluations only (independent
// of the closed-form derivative identities).
double black_residual_pointwise(const HeatSurface& surface, double x, double t, ResidualSteps steps = {});

// Defect of the advected diffusion equation satisfied by r/x along the
// heat parametrization, by central differences of eval_relative_r.
double burgers_residual(const HeatSurface& surface, double x, double t, ResidualSteps steps = {});

// gamma_t - (|lambda|^2/2) (1/gamma)_xx by finite differences of eval_gamma
// and eval_r.
double pme_residual(const HeatSurface& surface, double x, double t, ResidualSteps steps = {});

enum class Provenance { transform, finite_difference };

struct EmpiricalBounds {
    double k0, K0;        // bounds of r/x
    double k1, K1;        // bounds of r_x
    double K2;            // sup |x r_xx|
    double K_r_rxx;       // sup |r r_xx|
    double K_rsq_xx;      // sup |(r^2)_xx|
    double m_rt, M_rt;    // bounds of |r_t|/x where r_t is resolved
};

// Grid surface of r and derivatives with provenance. t_grid ascends and ends
// at the horizon; x_grid ascends, x=0 admitted only as a stored boundary row.
class RTSurface {
public:
    static RTSurface from_transform(const HeatSurface& surface, std::vector<double> x_grid,
                                    std::vector<double> t_grid);
    // Assembled by the finite-difference oracle.
    static RTSurface from_grid(std::vector<double> x_grid, std::vector<double> t_grid,
                               std::vector<double> r_values, Provenance prov, MarketParams market);

    std::size_t nx() const { return x_grid_.size(); }
    std::size_t nt() const { return t_grid_.size(); }
    const std::vector<double>& x_grid() const { return x_grid_; }
    const std::vector<double>& t_grid() const { return t_grid_; }
    double r(std::size_t xi, std::size_t ti) const { return r_[idx(xi, ti)]; }
    double r_x(std::size_t xi, std::size_t ti) const { return rx_[idx(xi, ti)]; }
    double r_xx(std::size_t xi, std::size_t ti) const { return rxx_[idx(xi, ti)]; }
    // dr/dt by second-order differences on the time grid (one-sided at the ends).
    double r_t(std::size_t xi, std::size_t ti) const;
    Provenance provenance() const { return prov_; }
    const MarketParams& market() const { return market_; }

    // r_t + (|lambda|^2/2) r^2 r_xx at an interior time index.
    double black_residual(std::size_t xi, std::size_t ti) const;

    EmpiricalBounds empirical_bounds() const;

private:
    std::size_t idx(std::size_t xi, std::size_t ti) const { return ti * x_grid_.size() + xi; }

    std::vector<double> x_grid_, t_grid_;
    std::vector<double> r_, rx_, rxx_;
    Provenance prov_ = Provenance::transform;
    MarketParams market_ = MarketParams::from_lambda_sq(0.0, 1.0);
};

}  // namespace blackrt
