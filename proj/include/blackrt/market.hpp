#pragma once

#include <cstddef>
#include <vector>

namespace blackrt {

// Log-normal market: invertible N x N volatility, drift vector, riskless
// rate and horizon. lambda solves sigma^T lambda = mu - rate * 1; only
// |lambda|^2 enters the equations downstream.
class MarketParams {
public:
    // sigma is row-major N x N.
    MarketParams(std::vector<double> sigma, std::vector<double> mu, double rate, double horizon);

    // Synthetic single-asset market realizing the given |lambda|^2.
    static MarketParams from_lambda_sq(double lambda_sq, double horizon);

    std::size_t num_assets() const { return n_; }
    const std::vector<double>& sigma() const { return sigma_; }
    const std::vector<double>& mu() const { return mu_; }
    double rate() const { return rate_; }
    double horizon() const { return horizon_; }
    const std::vector<double>& lambda() const { return lambda_; }
    double lambda_sq() const { return lambda_sq_; }

    // Solve sigma * pi = rhs (used by the policy map). Throws on singular sigma.
    std::vector<double> solve_sigma(const std::vector<double>& rhs) const;

private:
    std::size_t n_ = 0;
    std::vector<double> sigma_;
    std::vector<double> mu_;
    double rate_ = 0.0;
    double horizon_ = 0.0;
    std::vector<double> lambda_;
    double lambda_sq_ = 0.0;
};

}  // namespace blackrt
