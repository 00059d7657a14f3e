#include <doctest.h>

#include <cmath>

#include "blackrt/heat_engine.hpp"
#include "blackrt/numeric.hpp"

using namespace blackrt;

namespace {
UtilitySpec mix23() { return UtilitySpec::exp_sum({{2.0, 1.0}, {3.0, 1.0}}); }

HeatSurface mix_surface(double lambda_sq, double horizon, HeatEvaluator kind, std::size_t order = 128) {
    QuadratureParams qp;
    qp.order = order;
    return HeatSurface(mix23(), MarketParams::from_lambda_sq(lambda_sq, horizon), kind, qp);
}
}  // namespace

TEST_CASE("closed-form values of the exponential-sum heat solution") {
    // single exponential: H(z,t) = e^{z + 0.125 (1-t)} for |lambda|^2 = 1/4, T = 1
    const HeatSurface h1(UtilitySpec::exp_sum({{1.0, 1.0}}), MarketParams::from_lambda_sq(0.25, 1.0));
    CHECK(h1.eval(0.0, 0.0, 0) == doctest::Approx(std::exp(0.125)).epsilon(1e-14));

    const HeatSurface hm(mix23(), MarketParams::from_lambda_sq(1.0, 1.0));
    CHECK(hm.eval(0.0, 1.0, 1) == doctest::Approx(5.0).epsilon(1e-14));
    // T - t = 0.5: e^1 + e^{2.25}
    const double want = std::exp(1.0) + std::exp(2.25);
    CHECK(hm.eval(0.0, 0.5, 0) == doctest::Approx(want).epsilon(1e-14));

    CHECK_THROWS_AS(hm.eval(0.0, -0.1, 0), std::invalid_argument);
    CHECK_THROWS_AS(hm.eval(0.0, 1.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(hm.eval(0.0, 0.5, 4), std::invalid_argument);
}

TEST_CASE("terminal slice matches the inverse marginal") {
    const HeatSurface h = mix_surface(1.0, 1.0, HeatEvaluator::quadrature);
    for (double z : linspace(-8.0, 8.0, 33)) {
        const double want = eval_I(mix23(), std::exp(-z), 0);
        CHECK(rel_diff(h.eval(z, 1.0, 0), want) < 1e-12);
    }
}

TEST_CASE("quadrature agrees with the closed form to 1e-8 from order 64") {
    const HeatSurface exact = mix_surface(1.0, 1.0, HeatEvaluator::closed_form);
    for (std::size_t order : {64u, 128u}) {
        const HeatSurface quad = mix_surface(1.0, 1.0, HeatEvaluator::quadrature, order);
        for (double t : {0.0, 0.5, 1.0}) {
            for (double z : linspace(-10.0, 10.0, 21)) {
                for (int ord = 0; ord <= 3; ++ord) {
                    CHECK(rel_diff(quad.eval(z, t, ord), exact.eval(z, t, ord)) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("quadrature surface satisfies the heat equation at second order") {
    const HeatSurface h = mix_surface(1.0, 1.0, HeatEvaluator::quadrature);
    auto residual = [&](double z, double t, double step) {
        const double h_t = (h.eval(z, t + step, 0) - h.eval(z, t - step, 0)) / (2.0 * step);
        const double h_zz = (h.eval(z + step, t, 0) - 2.0 * h.eval(z, t, 0) + h.eval(z - step, t, 0)) /
                            (step * step);
        return std::abs(h_t + 0.5 * h_zz);
    };
    for (double z : {-2.0, 0.0, 1.5}) {
        const double r1 = residual(z, 0.5, 0.02);
        const double r2 = residual(z, 0.5, 0.01);
        const double order = std::log2(r1 / r2);
        CHECK(order > 1.8);
    }
}

TEST_CASE("H_z and H_zz stay positive on probe grids") {
    for (HeatEvaluator kind : {HeatEvaluator::closed_form, HeatEvaluator::quadrature}) {
        const HeatSurface h = mix_surface(1.0, 1.0, kind);
        for (double t : {0.0, 0.3, 1.0})
            for (double z : linspace(-10.0, 10.0, 41)) {
                CHECK(h.eval(z, t, 1) > 0.0);
                CHECK(h.eval(z, t, 2) > 0.0);
            }
    }
}

TEST_CASE("derivative ratio report reflects the exponent range") {
    const auto zs = linspace(-8.0, 8.0, 33);
    const auto ts = linspace(0.0, 1.0, 5);

    const auto rep_mix = mix_surface(1.0, 1.0, HeatEvaluator::closed_form).derivative_ratios(zs, ts);
    CHECK(rep_mix.all_finite);
    CHECK(rep_mix.n1 >= 2.0 - 1e-12);
    CHECK(rep_mix.N1 <= 3.0 + 1e-12);
    CHECK(rep_mix.n2 >= 2.0 - 1e-12);
    CHECK(rep_mix.N2 <= 3.0 + 1e-12);
    CHECK(rep_mix.N3 <= 3.0 + 1e-12);

    const HeatSurface single(UtilitySpec::exp_sum({{2.0, 1.0}}), MarketParams::from_lambda_sq(1.0, 1.0));
    const auto rep_single = single.derivative_ratios(zs, ts);
    CHECK(rep_single.n1 == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(rep_single.N2 == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(rep_single.N3 == doctest::Approx(2.0).epsilon(1e-13));

    const HeatSurface wide(UtilitySpec::exp_sum({{1.5, 2.0}, {4.0, 1.0}}),
                           MarketParams::from_lambda_sq(1.0, 1.0));
    const auto rep_wide = wide.derivative_ratios(zs, ts);
    CHECK(rep_wide.n1 >= 1.5 - 1e-12);
    CHECK(rep_wide.N1 <= 4.0 + 1e-12);
    CHECK(rep_wide.n2 >= 1.5 - 1e-12);
    CHECK(rep_wide.N2 <= 4.0 + 1e-12);
    CHECK(rep_wide.N3 <= 4.0 + 1e-12);
}

TEST_CASE("adaptive z bracket covers the requested wealth range") {
    const HeatSurface h = mix_surface(1.0, 1.0, HeatEvaluator::closed_form);
    const auto [z_lo, z_hi] = h.z_bracket(0.05, 500.0);
    for (double t : {0.0, 1.0}) {
        CHECK(h.eval(z_lo, t, 0) < 0.05 / 10.0);
        CHECK(h.eval(z_hi, t, 0) > 10.0 * 500.0);
    }
}

TEST_CASE("quadrature non-convergence is reported") {
    QuadratureParams qp;
    qp.order = 2;
    qp.self_check_tol = 1e-12;
    CHECK_THROWS_AS(HeatSurface(mix23(), MarketParams::from_lambda_sq(4.0, 1.0), HeatEvaluator::quadrature, qp),
                    std::runtime_error);
}

TEST_CASE("tabulated specs cannot back a heat surface") {
    CHECK_THROWS_AS(HeatSurface(UtilitySpec::tabulated_r({0.0, 1.0}, {0.0, 1.0}),
                                MarketParams::from_lambda_sq(1.0, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("generic heat evolution reproduces the gaussian closed form") {
    const MarketParams mkt = MarketParams::from_lambda_sq(1.0, 1.0);
    const auto rule = gauss_hermite(128);
    auto h0 = [](double z) { return std::exp(-z * z); };
    for (double t : {0.0, 0.25, 0.75}) {
        const double s2 = mkt.lambda_sq() * (mkt.horizon() - t);
        for (double z : linspace(-3.0, 3.0, 13)) {
            const double want = std::exp(-z * z / (1.0 + 2.0 * s2)) / std::sqrt(1.0 + 2.0 * s2);
            CHECK(rel_diff(heat_evolve(h0, mkt, z, t, rule), want) < 1e-12);
        }
    }
}

TEST_CASE("log_eval stays finite where eval overflows") {
    const HeatSurface h = mix_surface(1.0, 1.0, HeatEvaluator::closed_form);
    const double big_z = 400.0;
    CHECK(std::isinf(h.eval(big_z, 0.0, 0)));
    CHECK(h.log_eval(big_z, 0.0, 0) == doctest::Approx(3.0 * big_z + 4.5).epsilon(1e-9));
}
