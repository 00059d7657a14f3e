#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "blackrt/fd_oracle.hpp"
#include "blackrt/heat_engine.hpp"
#include "blackrt/rt_transform.hpp"

namespace blackrt {

// One universally quantified inequality over a finite grid. The arg-max
// violation is recorded even on pass; `applicable` is false when a stated
// hypothesis failed and the check was skipped rather than judged.
struct CheckRecord {
    std::string check;
    std::string fixture;
    std::string grid;
    bool applicable = true;
    bool passed = false;
    double worst_violation = 0.0;
    double where_x = std::numeric_limits<double>::quiet_NaN();
    double where_t = std::numeric_limits<double>::quiet_NaN();
    double tolerance = 0.0;
    std::string note;
};

using PropertyReport = std::vector<CheckRecord>;

// 1e-7 on transform surfaces, 10 (dx^2 + dtau) on finite-difference ones.
double default_check_tolerance(const RTSurface& s);

// Ordered terminal data propagate to ordered solutions. R1 <= R2 on the grid
// is a usage precondition (throws when violated).
CheckRecord check_comparison(const std::function<double(double)>& R1,
                             const std::function<double(double)>& R2, const FDConfig& config,
                             double tol = -1.0, const std::string& fixture = "");

// Strictly increasing terminal data stay strictly increasing: r_x > 0.
CheckRecord check_monotonicity(const RTSurface& s, double tol = -1.0, const std::string& fixture = "");

enum class Curvature { concave, convex };

// Curvature of the terminal datum is preserved, and drives the time trend:
// concave => r_xx <= tol and r_t >= -tol; convex reversed.
CheckRecord check_curvature(const RTSurface& s, Curvature expect, double tol = -1.0,
                            const std::string& fixture = "");

// Dependence on |lambda|^2 follows the terminal curvature. Builds transform
// surfaces for specs carrying an inverse marginal.
CheckRecord check_lambda_monotonicity(const UtilitySpec& spec, double lambda_sq_low,
                                      double lambda_sq_high, std::span<const double> x_grid,
                                      std::span<const double> t_grid, double horizon, double tol = -1.0,
                                      const std::string& fixture = "");
// Finite-difference route for terminal data given only as R; the terminal
// curvature is detected from samples (mixed curvature is a usage error).
CheckRecord check_lambda_monotonicity_fd(const std::function<double(double)>& terminal,
                                         double lambda_sq_low, double lambda_sq_high, const FDConfig& base,
                                         double tol = -1.0, const std::string& fixture = "");

// Sign changes of a sampled profile, ignoring entries below the threshold.
int count_sign_changes(std::span<const double> values, double threshold);

struct InflectionResult {
    CheckRecord record;
    std::vector<double> times;
    std::vector<double> locations;  // X(t); NaN where the count is not one
    std::vector<int> counts;        // sign changes of r_xx(., t)
    double max_jump = 0.0;          // continuity proxy max |X(t_{k+1}) - X(t_k)|
};

// A single interior sign change of the terminal curvature propagates as a
// unique continuous curve of inflection points.
InflectionResult track_inflection_curve(const RTSurface& s, double tol = -1.0,
                                        const std::string& fixture = "");

enum class Trend { increasing, decreasing };

// Monotone relative risk tolerance propagates: sign of (r/x)_x is uniform.
CheckRecord check_relative_monotonicity(const RTSurface& s, Trend expect, double tol = -1.0,
                                        const std::string& fixture = "");

// Log-curvature hypotheses on the terminal H slice force a uniform sign of
// (r/x)_xx for all earlier times. Skips (applicable = false) when neither
// hypothesis case holds on the z grid.
CheckRecord check_relative_curvature(const HeatSurface& surface, std::span<const double> z_grid,
                                     std::span<const double> t_grid, double tol = 1e-7,
                                     const std::string& fixture = "");

// Linear envelopes a x <= r <= b x from the exponent range of an atomic
// measure; the note reports the empirical derivative constants to order 3.
CheckRecord check_cm_bounds(const HeatSurface& surface, const RTSurface& s, double tol = -1.0,
                            const std::string& fixture = "");

enum class LogCurvature { log_concave, log_convex };

// Heat evolution preserves log-concavity/log-convexity of a positive datum.
CheckRecord check_logconcavity_preservation(const std::function<double(double)>& h0,
                                            const MarketParams& market, std::span<const double> z_grid,
                                            std::span<const double> t_set, LogCurvature mode,
                                            double tol = 1e-6, const std::string& fixture = "");

}  // namespace blackrt
