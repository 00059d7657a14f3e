#pragma once

#include <cstddef>
#include <vector>

namespace blackrt {

// Nodes and weights for int f(u) exp(-u^2) du ~ sum w_i f(u_i).
// Nodes ascend symmetrically about 0; the rule is exact for polynomials of
// degree 2n-1 and the weights sum to sqrt(pi).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(std::size_t n);

// Expectation of f under a standard normal: E[f(xi)] = pi^{-1/2} sum w_i f(sqrt(2) u_i).
template <typename F>
double gauss_hermite_expect(const GaussHermiteRule& rule, F&& f) {
    constexpr double inv_sqrt_pi = 0.5641895835477562869;
    constexpr double sqrt2 = 1.4142135623730950488;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(sqrt2 * rule.nodes[i]);
    return inv_sqrt_pi * acc;
}

}  // namespace blackrt
