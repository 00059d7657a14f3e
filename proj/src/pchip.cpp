#include "blackrt/pchip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blackrt {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matching samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: abscissae must be strictly increasing");

    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // Clamp the endpoint tangents (Fritsch-Carlson region for the first/last cell).
    for (std::size_t i : {std::size_t(0), n - 1}) {
        const double dd = d[i == 0 ? 0 : n - 2];
        if (dd == 0.0)
            m_[i] = 0.0;
        else if (m_[i] / dd > 3.0)
            m_[i] = 3.0 * dd;
        else if (m_[i] / dd < 0.0)
            m_[i] = 0.0;
    }
}

std::size_t MonotoneCubic::interval(double x) const {
    if (x < x_.front() || x > x_.back())
        throw std::out_of_range("MonotoneCubic: " + std::to_string(x) + " outside tabulated range [" +
                                std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i > 0) --i;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    return i;
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    const std::size_t i = interval(x);
    const double h = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / h;
    const double s2 = s * s;
    const double dh00 = (6 * s2 - 6 * s) / h;
    const double dh10 = 3 * s2 - 4 * s + 1;
    const double dh01 = (-6 * s2 + 6 * s) / h;
    const double dh11 = 3 * s2 - 2 * s;
    return dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] + dh11 * m_[i + 1];
}

}  // namespace blackrt
