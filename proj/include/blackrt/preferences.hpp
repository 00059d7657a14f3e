#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "blackrt/pchip.hpp"

namespace blackrt {

// One atom of the inverse-marginal measure: contributes weight * x^{-exponent}.
struct CMAtom {
    double exponent;
    double weight;
};

// User-supplied inverse marginal with derivatives. order0/order1 are
// mandatory; higher orders may be absent (evaluation then rejects them).
struct AnalyticInverseMarginal {
    std::function<double(double)> order0;
    std::function<double(double)> order1;
    std::function<double(double)> order2;
    std::function<double(double)> order3;
};

// Terminal risk preference. Immutable after construction; all evaluations
// are pure and thread-safe.
class UtilitySpec {
public:
    enum class Kind { cm_measure, exp_sum, analytic_i, tabulated_r };

    // Atomic measure with exponents strictly above 1 (the completely
    // monotonic family proper).
    static UtilitySpec cm_measure(std::vector<CMAtom> atoms);
    // Same evaluation path, but exponents down to 1 are admitted so the
    // log-utility edge case stays expressible.
    static UtilitySpec exp_sum(std::vector<CMAtom> atoms);
    static UtilitySpec analytic(AnalyticInverseMarginal im);
    // Samples of R on a grid with R(0) = 0, both columns strictly increasing.
    static UtilitySpec tabulated_r(std::vector<double> x, std::vector<double> r);

    Kind kind() const { return kind_; }
    bool has_inverse_marginal() const { return kind_ != Kind::tabulated_r; }
    const std::vector<CMAtom>& atoms() const;
    double min_exponent() const;
    double max_exponent() const;
    int max_analytic_order() const;  // highest derivative order available
    const MonotoneCubic& tabulated() const;
    std::string describe() const;

    friend double eval_I(const UtilitySpec& spec, double x, int order);
    friend double eval_R_terminal(const UtilitySpec& spec, double x);

private:
    UtilitySpec() = default;

    Kind kind_ = Kind::exp_sum;
    std::vector<CMAtom> atoms_;
    AnalyticInverseMarginal analytic_;
    std::shared_ptr<const MonotoneCubic> tab_;
};

// I^{(order)}(x), order in 0..3. Sign alternates with order for the atomic
// variants (complete monotonicity).
double eval_I(const UtilitySpec& spec, double x, int order = 0);

// Terminal risk tolerance R(x) = -U'(x)/U''(x). For inverse-marginal
// variants this is -y I'(y) at the y solving I(y) = x; for tabulated
// specs it is the monotone interpolant (no extrapolation).
double eval_R_terminal(const UtilitySpec& spec, double x);

// Growth and derivative-ratio constants of the standing conditions on I.
struct ConditionConstants {
    double growth_C;
    double growth_delta;
    double c1;
    double C1;
    double c2;
    double C2;
    double C3;
};

// Tightest constants over the probe grid; throws (naming the failing
// inequality and probe point) if a structural sign requirement or c2 > 1
// is violated.
ConditionConstants validate_conditions(const UtilitySpec& spec, std::span<const double> probe_grid);

// 81 log-spaced probes covering [1e-4, 1e4].
std::vector<double> default_probe_grid();

// Density at rho of the Laplace-representation measure of I:
// sum_i w_i rho^{y_i - 1} / Gamma(y_i).
double bernstein_transform(const UtilitySpec& spec, double rho);

// Analytic inverse marginal x^{-c} e^{-x} (c >= 1/4 keeps R increasing).
// Its terminal heat slice is log-concave with positive third log-derivative
// everywhere, which makes it the working fixture for the relative-curvature
// experiments.
UtilitySpec make_powexp_spec(double c);

}  // namespace blackrt
