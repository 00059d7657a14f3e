#include "blackrt/gauss_hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blackrt {

namespace {

// Eigenvalues of the symmetric tridiagonal Jacobi matrix together with the
// first component of each eigenvector (QL with implicit shifts, EISPACK
// imtql2 specialized to track only the first row).
void tridiagonal_eigen(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const std::size_t n = d.size();
    e.push_back(0.0);
    for (std::size_t l = 0; l < n; ++l) {
        for (int iter = 0;; ++iter) {
            if (iter > 60) throw std::runtime_error("gauss_hermite: eigenvalue iteration failed");
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m == l) break;
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            for (std::size_t i = m; i-- > l;) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (r == 0.0 && m - l > 1) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

}  // namespace

// Golub-Welsch: nodes are the Jacobi-matrix eigenvalues, weights come from
// the squared first eigenvector components scaled by the zeroth moment
// sqrt(pi). Stable for orders well beyond what the downstream surfaces use.
GaussHermiteRule gauss_hermite(std::size_t n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    std::vector<double> d(n, 0.0);
    std::vector<double> e(n - 1);
    for (std::size_t k = 1; k < n; ++k) e[k - 1] = std::sqrt(0.5 * static_cast<double>(k));
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;
    tridiagonal_eigen(d, e, z);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    const double sqrt_pi = std::sqrt(M_PI);
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = d[order[i]];
        rule.weights[i] = sqrt_pi * z[order[i]] * z[order[i]];
    }
    // The rule is symmetric; tighten the computed pairs to exact mirrors.
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        const double node = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -node;
        rule.nodes[j] = node;
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace blackrt
