#include "blackrt/heat_engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "blackrt/numeric.hpp"

namespace blackrt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// z-derivatives of the terminal datum phi(z) = I(e^{-z}), chain rule on I.
double terminal_derivative(const UtilitySpec& spec, double z, int order) {
    const double q = std::exp(-z);
    switch (order) {
        case 0:
            return eval_I(spec, q, 0);
        case 1:
            return -q * eval_I(spec, q, 1);
        case 2:
            return q * eval_I(spec, q, 1) + q * q * eval_I(spec, q, 2);
        case 3:
            return -q * eval_I(spec, q, 1) - 3.0 * q * q * eval_I(spec, q, 2) -
                   q * q * q * eval_I(spec, q, 3);
        default:
            throw std::invalid_argument("eval_H: order must be in 0..3");
    }
}

HeatEvaluator default_evaluator(const UtilitySpec& spec) {
    return spec.kind() == UtilitySpec::Kind::analytic_i ? HeatEvaluator::quadrature
                                                        : HeatEvaluator::closed_form;
}

double evolve_with_rule(const GaussHermiteRule& rule, const UtilitySpec& spec, double z, double s, int order) {
    if (s == 0.0) return terminal_derivative(spec, z, order);
    return gauss_hermite_expect(rule, [&](double shift) { return terminal_derivative(spec, z + s * shift, order); });
}

}  // namespace

HeatSurface::HeatSurface(UtilitySpec spec, MarketParams market)
    : HeatSurface(spec, std::move(market), default_evaluator(spec)) {}

HeatSurface::HeatSurface(UtilitySpec spec, MarketParams market, HeatEvaluator kind, QuadratureParams qp)
    : spec_(std::move(spec)), market_(std::move(market)), kind_(kind) {
    if (!spec_.has_inverse_marginal())
        throw std::invalid_argument("HeatSurface: tabulated-R specs carry no inverse marginal");
    if (kind_ == HeatEvaluator::closed_form && spec_.kind() == UtilitySpec::Kind::analytic_i)
        throw std::invalid_argument("HeatSurface: closed form needs an atomic measure");
    if (kind_ == HeatEvaluator::quadrature) {
        if (qp.order < 2) throw std::invalid_argument("HeatSurface: quadrature order too small");
        rule_ = gauss_hermite(qp.order);
        // Truncation meter: the rule must agree with its doubled-order refinement.
        const auto fine = gauss_hermite(2 * qp.order);
        const double s0 = std::sqrt(market_.lambda_sq() * market_.horizon());
        for (double z : {-6.0, -2.0, 0.0, 2.0, 6.0}) {
            const double coarse = evolve_with_rule(rule_, spec_, z, s0, 0);
            const double refined = evolve_with_rule(fine, spec_, z, s0, 0);
            if (std::isfinite(coarse) && std::isfinite(refined) && rel_diff(coarse, refined) > qp.self_check_tol)
                throw std::runtime_error("HeatSurface: quadrature non-convergence at z=" + format_double(z) +
                                         " (order " + std::to_string(qp.order) + ")");
        }
    }
    check_construction();
}

void HeatSurface::check_construction() const {
    // Full range and monotonicity probes; curvature too, since every
    // admissible spec here has strictly increasing R. Probes whose values
    // sink below the representable range are skipped (steeply decaying data
    // underflow there without violating anything).
    const double T = market_.horizon();
    const int max_ord = spec_.kind() == UtilitySpec::Kind::analytic_i ? spec_.max_analytic_order() : 3;
    for (double t : {0.0, 0.5 * T, T}) {
        for (double z : {-8.0, -3.0, 0.0, 3.0, 8.0}) {
            const double h0 = eval(z, t, 0);
            if (!std::isfinite(h0) || h0 < 1e-280) continue;
            if (!(eval(z, t, 1) > 0.0))
                throw std::runtime_error("HeatSurface: H_z <= 0 at probe (z=" + format_double(z) + ")");
            if (max_ord >= 2 && !(eval(z, t, 2) > 0.0))
                throw std::runtime_error("HeatSurface: H_zz <= 0 at probe (z=" + format_double(z) + ")");
        }
        if (!(eval(-8.0, t, 0) < eval(8.0, t, 0)))
            throw std::runtime_error("HeatSurface: H not increasing across probe span");
    }
}

double HeatSurface::closed_log_eval(double z, double t, int order) const {
    const double tau = market_.horizon() - t;
    const double half_lsq = 0.5 * market_.lambda_sq();
    double m = -kInf;
    const auto& atoms = spec_.atoms();
    auto log_term = [&](const CMAtom& a) {
        return std::log(a.weight) + order * std::log(a.exponent) + a.exponent * z +
               half_lsq * a.exponent * a.exponent * tau;
    };
    for (const auto& a : atoms) m = std::max(m, log_term(a));
    double s = 0.0;
    for (const auto& a : atoms) s += std::exp(log_term(a) - m);
    return m + std::log(s);
}

double HeatSurface::quad_eval(double z, double t, int order) const {
    const double s = std::sqrt(market_.lambda_sq() * (market_.horizon() - t));
    return evolve_with_rule(rule_, spec_, z, s, order);
}

double HeatSurface::eval(double z, double t, int order) const {
    if (order < 0 || order > 3) throw std::invalid_argument("eval_H: order must be in 0..3");
    if (t < 0.0 || t > market_.horizon())
        throw std::invalid_argument("eval_H: t=" + format_double(t) + " outside [0, " +
                                    format_double(market_.horizon()) + "]");
    if (kind_ == HeatEvaluator::closed_form) return std::exp(closed_log_eval(z, t, order));
    return quad_eval(z, t, order);
}

double HeatSurface::log_eval(double z, double t, int order) const {
    if (kind_ == HeatEvaluator::closed_form) {
        if (order < 0 || order > 3) throw std::invalid_argument("eval_H: order must be in 0..3");
        if (t < 0.0 || t > market_.horizon()) throw std::invalid_argument("eval_H: t outside [0, T]");
        return closed_log_eval(z, t, order);
    }
    if (order > 2)
        throw std::invalid_argument("log_eval: order 3 has no definite sign for a general datum");
    return std::log(eval(z, t, order));
}

std::pair<double, double> HeatSurface::z_bracket(double x_lo, double x_hi) const {
    if (!(x_lo > 0.0) || !(x_hi >= x_lo)) throw std::invalid_argument("z_bracket: need 0 < x_lo <= x_hi");
    const double T = market_.horizon();
    // H(z, .) decreases toward the terminal slice for convex data, so t = 0
    // dominates from above and t = T from below.
    const double lo_target = std::log(x_lo / 10.0);
    const double hi_target = std::log(10.0 * x_hi);
    double z_lo = -1.0;
    int guard = 0;
    while (!(log_eval(z_lo, 0.0, 0) < lo_target)) {
        z_lo *= 2.0;
        if (++guard > 64) throw std::runtime_error("z_bracket: expansion failed on the left");
    }
    double z_hi = 1.0;
    guard = 0;
    while (!(log_eval(z_hi, T, 0) > hi_target)) {
        z_hi *= 2.0;
        if (++guard > 64) throw std::runtime_error("z_bracket: expansion failed on the right");
    }
    return {z_lo, z_hi};
}

HeatSurface::RatioReport HeatSurface::derivative_ratios(std::span<const double> z_grid,
                                                        std::span<const double> t_grid) const {
    if (spec_.kind() == UtilitySpec::Kind::analytic_i && spec_.max_analytic_order() < 3)
        throw std::invalid_argument("derivative_ratios: needs I derivatives up to order 3");
    RatioReport rep;
    rep.n1 = rep.n2 = kInf;
    rep.N1 = rep.N2 = rep.N3 = 0.0;
    for (double t : t_grid) {
        for (double z : z_grid) {
            const double h0 = eval(z, t, 0);
            const double h1 = eval(z, t, 1);
            const double h2 = eval(z, t, 2);
            const double h3 = eval(z, t, 3);
            const double r1 = h1 / h0;
            const double r2 = h2 / h1;
            const double r3 = std::abs(h3) / std::abs(h2);
            if (!std::isfinite(r1) || !std::isfinite(r2) || !std::isfinite(r3)) {
                if (rep.all_finite) {
                    rep.bad_z = z;
                    rep.bad_t = t;
                }
                rep.all_finite = false;
                continue;
            }
            rep.n1 = std::min(rep.n1, r1);
            rep.N1 = std::max(rep.N1, r1);
            rep.n2 = std::min(rep.n2, r2);
            rep.N2 = std::max(rep.N2, r2);
            rep.N3 = std::max(rep.N3, r3);
        }
    }
    if (spec_.kind() == UtilitySpec::Kind::analytic_i) {
        try {
            const auto grid = default_probe_grid();
            validate_conditions(spec_, grid);
        } catch (const std::exception&) {
            rep.advisory = true;
        }
    }
    return rep;
}

double heat_evolve(const std::function<double(double)>& terminal, const MarketParams& market, double z,
                   double t, const GaussHermiteRule& rule) {
    const double s = std::sqrt(market.lambda_sq() * (market.horizon() - t));
    if (s == 0.0) return terminal(z);
    return gauss_hermite_expect(rule, [&](double shift) { return terminal(z + s * shift); });
}

}  // namespace blackrt
