#include "blackrt/preferences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "blackrt/numeric.hpp"
#include "blackrt/root_finding.hpp"

namespace blackrt {

namespace {

void check_atoms(const std::vector<CMAtom>& atoms, double min_allowed_exponent) {
    if (atoms.empty()) throw std::invalid_argument("UtilitySpec: atom list is empty");
    for (const auto& a : atoms) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("UtilitySpec: atom weights must be positive");
        if (!(a.exponent >= min_allowed_exponent))
            throw std::invalid_argument("UtilitySpec: atom exponent " + std::to_string(a.exponent) +
                                        " below admissible minimum " + std::to_string(min_allowed_exponent));
        if (!std::isfinite(a.exponent) || !std::isfinite(a.weight))
            throw std::invalid_argument("UtilitySpec: atom parameters must be finite");
    }
}

// Probe the supplied derivatives for sign structure and consistency with
// central differences (relative 1e-6) before accepting an analytic spec.
void check_analytic(const AnalyticInverseMarginal& im) {
    if (!im.order0 || !im.order1)
        throw std::invalid_argument("UtilitySpec: analytic inverse marginal needs orders 0 and 1");
    const double probes[] = {0.1, 0.5, 1.0, 2.0, 10.0};
    for (double x : probes) {
        const double i0 = im.order0(x);
        const double i1 = im.order1(x);
        if (!(i0 > 0.0)) throw std::invalid_argument("UtilitySpec: analytic I must be positive (x=" + std::to_string(x) + ")");
        if (!(i1 < 0.0)) throw std::invalid_argument("UtilitySpec: analytic I must be strictly decreasing (x=" + std::to_string(x) + ")");
        if (im.order2 && !(im.order2(x) > 0.0))
            throw std::invalid_argument("UtilitySpec: analytic I must be convex (x=" + std::to_string(x) + ")");

        const double h = 1e-5 * x;
        const double fd1 = (im.order0(x + h) - im.order0(x - h)) / (2.0 * h);
        if (rel_diff(fd1, i1) > 1e-6)
            throw std::invalid_argument("UtilitySpec: supplied I' disagrees with finite differences at x=" +
                                        std::to_string(x));
        if (im.order2) {
            const double fd2 = (im.order1(x + h) - im.order1(x - h)) / (2.0 * h);
            if (rel_diff(fd2, im.order2(x)) > 1e-6)
                throw std::invalid_argument("UtilitySpec: supplied I'' disagrees with finite differences at x=" +
                                            std::to_string(x));
        }
        if (im.order3 && im.order2) {
            const double fd3 = (im.order2(x + h) - im.order2(x - h)) / (2.0 * h);
            if (rel_diff(fd3, im.order3(x)) > 1e-6)
                throw std::invalid_argument("UtilitySpec: supplied I''' disagrees with finite differences at x=" +
                                            std::to_string(x));
        }
    }
}

}  // namespace

UtilitySpec UtilitySpec::cm_measure(std::vector<CMAtom> atoms) {
    check_atoms(atoms, std::nextafter(1.0, 2.0));
    UtilitySpec s;
    s.kind_ = Kind::cm_measure;
    s.atoms_ = std::move(atoms);
    return s;
}

UtilitySpec UtilitySpec::exp_sum(std::vector<CMAtom> atoms) {
    check_atoms(atoms, 1.0);
    UtilitySpec s;
    s.kind_ = Kind::exp_sum;
    s.atoms_ = std::move(atoms);
    return s;
}

UtilitySpec UtilitySpec::analytic(AnalyticInverseMarginal im) {
    check_analytic(im);
    UtilitySpec s;
    s.kind_ = Kind::analytic_i;
    s.analytic_ = std::move(im);
    return s;
}

UtilitySpec UtilitySpec::tabulated_r(std::vector<double> x, std::vector<double> r) {
    if (x.empty() || x.size() != r.size())
        throw std::invalid_argument("UtilitySpec: tabulated R needs matching nonempty columns");
    if (x.front() != 0.0 || r.front() != 0.0)
        throw std::invalid_argument("UtilitySpec: tabulated R must start at R(0) = 0");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw std::invalid_argument("UtilitySpec: tabulated R must be strictly increasing");
    UtilitySpec s;
    s.kind_ = Kind::tabulated_r;
    s.tab_ = std::make_shared<MonotoneCubic>(std::move(x), std::move(r));
    return s;
}

const std::vector<CMAtom>& UtilitySpec::atoms() const {
    if (atoms_.empty()) throw std::logic_error("UtilitySpec: variant has no atoms");
    return atoms_;
}

double UtilitySpec::min_exponent() const {
    const auto& a = atoms();
    double m = a.front().exponent;
    for (const auto& atom : a) m = std::min(m, atom.exponent);
    return m;
}

double UtilitySpec::max_exponent() const {
    const auto& a = atoms();
    double m = a.front().exponent;
    for (const auto& atom : a) m = std::max(m, atom.exponent);
    return m;
}

int UtilitySpec::max_analytic_order() const {
    if (kind_ != Kind::analytic_i) return 3;
    if (analytic_.order3) return 3;
    if (analytic_.order2) return 2;
    return 1;
}

const MonotoneCubic& UtilitySpec::tabulated() const {
    if (!tab_) throw std::logic_error("UtilitySpec: variant has no tabulation");
    return *tab_;
}

std::string UtilitySpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::cm_measure:
        case Kind::exp_sum: {
            os << (kind_ == Kind::cm_measure ? "cm{" : "expsum{");
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) os << ",";
                os << atoms_[i].exponent << ":" << atoms_[i].weight;
            }
            os << "}";
            break;
        }
        case Kind::analytic_i:
            os << "analytic_i";
            break;
        case Kind::tabulated_r:
            os << "tabulated_r[" << tab_->x_min() << "," << tab_->x_max() << "]";
            break;
    }
    return os.str();
}

double eval_I(const UtilitySpec& spec, double x, int order) {
    if (!(x > 0.0)) throw std::invalid_argument("eval_I: x must be positive");
    if (order < 0 || order > 3) throw std::invalid_argument("eval_I: order must be in 0..3");
    switch (spec.kind_) {
        case UtilitySpec::Kind::cm_measure:
        case UtilitySpec::Kind::exp_sum: {
            // sum_i w_i prod_{k<order}(-y_i - k) x^{-y_i - order}; every term has
            // sign (-1)^order, so accumulate magnitudes in log space (max-shift).
            const double lx = std::log(x);
            auto log_term = [&](const CMAtom& a) {
                double lt = std::log(a.weight) - (a.exponent + order) * lx;
                for (int k = 0; k < order; ++k) lt += std::log(a.exponent + k);
                return lt;
            };
            double m = -std::numeric_limits<double>::infinity();
            for (const auto& a : spec.atoms_) m = std::max(m, log_term(a));
            double s = 0.0;
            for (const auto& a : spec.atoms_) s += std::exp(log_term(a) - m);
            const double mag = std::exp(m + std::log(s));
            return (order % 2 == 0) ? mag : -mag;
        }
        case UtilitySpec::Kind::analytic_i: {
            switch (order) {
                case 0:
                    return spec.analytic_.order0(x);
                case 1:
                    return spec.analytic_.order1(x);
                case 2:
                    if (!spec.analytic_.order2)
                        throw std::invalid_argument("eval_I: analytic spec has no second derivative");
                    return spec.analytic_.order2(x);
                default:
                    if (!spec.analytic_.order3)
                        throw std::invalid_argument("eval_I: analytic spec has no third derivative");
                    return spec.analytic_.order3(x);
            }
        }
        case UtilitySpec::Kind::tabulated_r:
            throw std::invalid_argument("eval_I: tabulated-R specs carry no inverse marginal");
    }
    throw std::logic_error("eval_I: unreachable");
}

namespace {

// Solve I(y) = x for y > 0; I is strictly decreasing with full range.
double invert_I(const UtilitySpec& spec, double x) {
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (eval_I(spec, lo, 0) < x) {
        lo *= 0.5;
        if (++guard > 2000) throw std::runtime_error("invert_I: bracket expansion failed (low side)");
    }
    guard = 0;
    while (eval_I(spec, hi, 0) > x) {
        hi *= 2.0;
        if (++guard > 2000) throw std::runtime_error("invert_I: bracket expansion failed (high side)");
    }
    if (lo == hi) return lo;
    return newton_bisect([&](double y) { return eval_I(spec, y, 0) - x; },
                         [&](double y) { return eval_I(spec, y, 1); }, lo, hi, 1e-14);
}

}  // namespace

double eval_R_terminal(const UtilitySpec& spec, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("eval_R_terminal: x must be positive");
    if (spec.kind_ == UtilitySpec::Kind::tabulated_r) return (*spec.tab_)(x);
    const double y = invert_I(spec, x);
    return -y * eval_I(spec, y, 1);
}

std::vector<double> default_probe_grid() { return logspace(1e-4, 1e4, 81); }

ConditionConstants validate_conditions(const UtilitySpec& spec, std::span<const double> probe_grid) {
    if (!spec.has_inverse_marginal())
        throw std::invalid_argument("validate_conditions: conditions are stated on I, not on R");
    if (probe_grid.size() < 2) throw std::invalid_argument("validate_conditions: probe grid too small");
    double pmin = probe_grid.front(), pmax = probe_grid.front();
    for (double p : probe_grid) {
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    if (!(pmin < 1.0 && pmax > 1.0) || std::log10(pmax / pmin) < 4.0)
        throw std::invalid_argument("validate_conditions: probe grid must span four decades around 1");
    if (spec.kind() == UtilitySpec::Kind::analytic_i && spec.max_analytic_order() < 3)
        throw std::invalid_argument("validate_conditions: needs I derivatives up to order 3");

    auto fail = [](const char* which, double x) {
        throw std::runtime_error(std::string("validate_conditions: inequality ") + which +
                                 " violated at probe x=" + format_double(x));
    };

    // Decay exponent: for atomic specs the top exponent is exact; otherwise
    // estimate from the left-end log-slope.
    double delta;
    if (spec.kind() != UtilitySpec::Kind::analytic_i) {
        delta = spec.max_exponent();
    } else {
        const double x0 = pmin;
        delta = std::max(0.0, -x0 * eval_I(spec, x0, 1) / eval_I(spec, x0, 0));
    }

    ConditionConstants cc{};
    cc.growth_delta = delta;
    cc.growth_C = 0.0;
    cc.c1 = std::numeric_limits<double>::infinity();
    cc.C1 = 0.0;
    cc.c2 = std::numeric_limits<double>::infinity();
    cc.C2 = 0.0;
    cc.C3 = 0.0;

    for (double x : probe_grid) {
        const double i0 = eval_I(spec, x, 0);
        const double i1 = eval_I(spec, x, 1);
        const double i2 = eval_I(spec, x, 2);
        const double i3 = eval_I(spec, x, 3);
        if (!(i0 > 0.0)) fail("I > 0", x);
        if (!(i1 < 0.0)) fail("I' < 0", x);
        if (!(i2 > 0.0)) fail("x I'' >= c2 |I'| (convexity)", x);

        cc.growth_C = std::max(cc.growth_C, i0 / (1.0 + std::pow(x, -delta)));
        const double ratio1 = std::abs(x * i1) / i0;
        cc.c1 = std::min(cc.c1, ratio1);
        cc.C1 = std::max(cc.C1, ratio1);
        const double ratio2 = x * i2 / std::abs(i1);
        cc.c2 = std::min(cc.c2, ratio2);
        cc.C2 = std::max(cc.C2, ratio2);
        cc.C3 = std::max(cc.C3, std::abs(x * i3) / i2);
    }
    if (!(cc.c2 > 1.0)) fail("c2 > 1", pmin);
    return cc;
}

UtilitySpec make_powexp_spec(double c) {
    if (!(c >= 0.25))
        throw std::invalid_argument("make_powexp_spec: c must be >= 0.25 for an increasing risk tolerance");
    AnalyticInverseMarginal im;
    auto base = [c](double x) { return std::pow(x, -c) * std::exp(-x); };
    im.order0 = base;
    im.order1 = [c, base](double x) { return base(x) * (-(c / x) - 1.0); };
    im.order2 = [c, base](double x) {
        const double p = -(c / x) - 1.0;
        return base(x) * (p * p + c / (x * x));
    };
    im.order3 = [c, base](double x) {
        const double p = -(c / x) - 1.0;
        const double p2 = c / (x * x);
        const double p3 = -2.0 * c / (x * x * x);
        return base(x) * (p3 + 3.0 * p * p2 + p * p * p);
    };
    return UtilitySpec::analytic(std::move(im));
}

double bernstein_transform(const UtilitySpec& spec, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("bernstein_transform: rho must be positive");
    if (spec.kind() != UtilitySpec::Kind::cm_measure && spec.kind() != UtilitySpec::Kind::exp_sum)
        throw std::invalid_argument("bernstein_transform: spec must be an atomic measure");
    double acc = 0.0;
    for (const auto& a : spec.atoms())
        acc += a.weight * std::pow(rho, a.exponent - 1.0) / std::tgamma(a.exponent);
    return acc;
}

}  // namespace blackrt
