#include <doctest.h>

#include <cmath>
#include <random>

#include "blackrt/gauss_hermite.hpp"
#include "blackrt/numeric.hpp"
#include "blackrt/pchip.hpp"
#include "blackrt/root_finding.hpp"

using namespace blackrt;

TEST_CASE("gauss_hermite moments") {
    for (std::size_t n : {16u, 64u, 128u}) {
        const auto rule = gauss_hermite(n);
        double w_sum = 0.0, m2 = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w_sum += rule.weights[i];
            m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
            m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
        }
        const double sqrt_pi = std::sqrt(M_PI);
        CHECK(w_sum == doctest::Approx(sqrt_pi).epsilon(1e-13));
        CHECK(m2 == doctest::Approx(0.5 * sqrt_pi).epsilon(1e-12));
        CHECK(m4 == doctest::Approx(0.75 * sqrt_pi).epsilon(1e-12));
    }
}

TEST_CASE("gauss_hermite gaussian expectation of exp") {
    // E[e^{a xi}] = e^{a^2/2} for xi ~ N(0,1)
    const auto rule = gauss_hermite(64);
    for (double a : {0.3, 1.0, 3.0}) {
        const double got = gauss_hermite_expect(rule, [a](double u) { return std::exp(a * u); });
        CHECK(got == doctest::Approx(std::exp(0.5 * a * a)).epsilon(1e-12));
    }
}

TEST_CASE("log_sum_exp handles large magnitudes") {
    const double terms[] = {1000.0, 1000.0};
    CHECK(log_sum_exp(terms) == doctest::Approx(1000.0 + std::log(2.0)));
    const double mixed[] = {-1.0, 2.0, 0.5};
    CHECK(log_sum_exp(mixed) ==
          doctest::Approx(std::log(std::exp(-1.0) + std::exp(2.0) + std::exp(0.5))));
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 12.206017664817571, -3.5e-12, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("newton_bisect finds bracketed roots") {
    const double r = newton_bisect([](double x) { return x * x - 2.0; }, [](double x) { return 2.0 * x; },
                                   0.0, 2.0, 1e-14);
    CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(newton_bisect([](double x) { return x + 10.0; }, [](double) { return 1.0; }, 0.0, 1.0,
                                  1e-12),
                    std::invalid_argument);
}

TEST_CASE("monotone cubic preserves monotone data and hits nodes") {
    std::vector<double> x{0.0, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> y{0.0, 0.3, 1.0, 1.4, 5.0};
    MonotoneCubic f(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(f(x[i]) == doctest::Approx(y[i]));
    double prev = f(0.0);
    for (double q = 0.01; q <= 4.0; q += 0.01) {
        const double v = f(q);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK_THROWS_AS(f(4.5), std::out_of_range);
    CHECK_THROWS_AS(f(-0.1), std::out_of_range);
}

TEST_CASE("monotone cubic reproduces linear data exactly") {
    std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    std::vector<double> y{0.0, 2.0, 4.0, 6.0};
    MonotoneCubic f(x, y);
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double q = u(gen);
        CHECK(f(q) == doctest::Approx(2.0 * q).epsilon(1e-14));
        CHECK(f.derivative(q) == doctest::Approx(2.0).epsilon(1e-12));
    }
}
