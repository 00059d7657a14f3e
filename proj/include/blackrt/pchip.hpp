#pragma once

#include <cstddef>
#include <vector>

namespace blackrt {

// Monotone cubic Hermite interpolant (Fritsch-Carlson tangents). Preserves
// the monotonicity of the samples; evaluation outside [x.front(), x.back()]
// is rejected.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::size_t interval(double x) const;

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // node tangents
};

}  // namespace blackrt
