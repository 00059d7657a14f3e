#include "blackrt/market.hpp"

#include <cmath>
#include <stdexcept>

namespace blackrt {

namespace {

// Dense LU solve with partial pivoting; a is row-major n x n and is
// consumed. Throws on a numerically singular pivot.
std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b, std::size_t n) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw std::invalid_argument("MarketParams: volatility matrix is zero");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
        if (std::abs(a[piv * n + k]) < 1e-13 * scale)
            throw std::invalid_argument("MarketParams: volatility matrix is singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / a[k * n + k];
            a[i * n + k] = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii * n + j] * x[j];
        x[ii] = s / a[ii * n + ii];
    }
    return x;
}

}  // namespace

MarketParams::MarketParams(std::vector<double> sigma, std::vector<double> mu, double rate, double horizon)
    : mu_(std::move(mu)), rate_(rate), horizon_(horizon) {
    n_ = mu_.size();
    if (n_ == 0) throw std::invalid_argument("MarketParams: need at least one asset");
    if (sigma.size() != n_ * n_) throw std::invalid_argument("MarketParams: sigma must be N x N");
    if (!(horizon > 0.0)) throw std::invalid_argument("MarketParams: horizon must be positive");
    sigma_ = std::move(sigma);

    // lambda = (sigma^T)^{-1} (mu - rate 1)
    std::vector<double> sigma_t(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) sigma_t[i * n_ + j] = sigma_[j * n_ + i];
    std::vector<double> excess(n_);
    for (std::size_t i = 0; i < n_; ++i) excess[i] = mu_[i] - rate_;
    lambda_ = lu_solve(std::move(sigma_t), std::move(excess), n_);
    lambda_sq_ = 0.0;
    for (double v : lambda_) lambda_sq_ += v * v;
}

MarketParams MarketParams::from_lambda_sq(double lambda_sq, double horizon) {
    if (!(lambda_sq >= 0.0)) throw std::invalid_argument("MarketParams: |lambda|^2 must be nonnegative");
    return MarketParams({1.0}, {std::sqrt(lambda_sq)}, 0.0, horizon);
}

std::vector<double> MarketParams::solve_sigma(const std::vector<double>& rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("MarketParams: rhs size mismatch");
    return lu_solve(sigma_, rhs, n_);
}

}  // namespace blackrt
