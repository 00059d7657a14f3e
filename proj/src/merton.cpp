#include "blackrt/merton.hpp"

#include <cmath>
#include <stdexcept>

#include "blackrt/numeric.hpp"

namespace blackrt {

double eval_u_x(const HeatSurface& surface, double x, double t) {
    if (!(x > 0.0)) throw std::invalid_argument("eval_u_x: x must be positive");
    const double z = invert_H(surface, x, t);
    return std::exp(-z - 0.5 * surface.market().lambda_sq() * (surface.market().horizon() - t));
}

PolicySample eval_policy(const HeatSurface& surface, const MarketParams& market, double x, double t) {
    PolicySample out;
    out.x = x;
    out.t = t;
    out.r = eval_r(surface, x, t).r;
    const auto& lambda = market.lambda();
    std::vector<double> rhs(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) rhs[i] = lambda[i] * out.r;
    out.pi = market.solve_sigma(rhs);
    // First-order condition check: sigma pi must reproduce lambda r.
    const std::size_t n = market.num_assets();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += market.sigma()[i * n + j] * out.pi[j];
        if (rel_diff(acc, rhs[i]) > 1e-10 && std::abs(acc - rhs[i]) > 1e-12)
            throw std::runtime_error("eval_policy: first-order condition violated by the linear solve");
    }
    out.total = 0.0;
    for (double v : out.pi) out.total += v;
    return out;
}

namespace {

// (U o I)(e^{-zeta}) for an atomic measure: per atom, w y/(y-1) e^{(y-1) zeta},
// degenerating to w * zeta for y = 1.
double utility_of_inverse_atomic(const UtilitySpec& spec, double zeta) {
    double acc = 0.0;
    for (const auto& a : spec.atoms()) {
        if (a.exponent == 1.0)
            acc += a.weight * zeta;
        else
            acc += a.weight * a.exponent / (a.exponent - 1.0) * std::exp((a.exponent - 1.0) * zeta);
    }
    return acc;
}

// General datum: integrate (U o I)'(zeta) = -e^{-2 zeta} I'(e^{-zeta}) from 0
// by composite Simpson. Only the residual meter uses this path.
double utility_of_inverse_generic(const UtilitySpec& spec, double zeta) {
    auto slope = [&](double v) {
        const double q = std::exp(-v);
        return -q * q * eval_I(spec, q, 1);
    };
    const int panels = 256;
    const double h = zeta / (2.0 * panels);
    if (zeta == 0.0) return 0.0;
    double acc = slope(0.0) + slope(zeta);
    for (int k = 1; k < 2 * panels; ++k) acc += slope(h * k) * (k % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

double value_function(const HeatSurface& surface, double x, double t) {
    const auto& spec = surface.spec();
    const double lsq = surface.market().lambda_sq();
    const double s = surface.market().horizon() - t;
    const double z = invert_H(surface, x, t);
    const double drift = z + lsq * s;
    const double vol = std::sqrt(lsq * s);
    auto psi = [&](double zeta) {
        return spec.kind() == UtilitySpec::Kind::analytic_i ? utility_of_inverse_generic(spec, zeta)
                                                            : utility_of_inverse_atomic(spec, zeta);
    };
    if (vol == 0.0) return psi(drift);
    static const GaussHermiteRule rule = gauss_hermite(96);
    return gauss_hermite_expect(rule, [&](double shift) { return psi(drift + vol * shift); });
}

double hjb_residual(const HeatSurface& surface, double x, double t, double ht_rel) {
    const double T = surface.market().horizon();
    double ht = ht_rel * T;
    ht = std::min({ht, t, T - t});
    if (!(ht > 0.0)) throw std::invalid_argument("hjb_residual: t must be interior to [0, T]");
    const double u_t = (value_function(surface, x, t + ht) - value_function(surface, x, t - ht)) / (2.0 * ht);
    const double ux = eval_u_x(surface, x, t);
    const double r = eval_r(surface, x, t).r;
    return u_t + 0.5 * surface.market().lambda_sq() * ux * r;
}

}  // namespace blackrt
