#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace blackrt {

// log(sum_i exp(a[i])) with max-shift; tolerates -inf entries.
inline double log_sum_exp(std::span<const double> a) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : a) m = std::max(m, v);
    if (!std::isfinite(m)) return m;  // all -inf (empty sum) or an inf dominates
    double s = 0.0;
    for (double v : a) s += std::exp(v - m);
    return m + std::log(s);
}

// Shortest round-trip decimal representation of a binary64 value.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
    out.back() = b;
    return out;
}

inline std::vector<double> logspace(double a, double b, std::size_t n) {
    auto out = linspace(std::log(a), std::log(b), n);
    for (double& v : out) v = std::exp(v);
    return out;
}

inline double rel_diff(double got, double want) {
    const double scale = std::max(std::abs(want), std::numeric_limits<double>::min());
    return std::abs(got - want) / scale;
}

}  // namespace blackrt
