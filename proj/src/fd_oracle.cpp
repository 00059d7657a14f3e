#include "blackrt/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "blackrt/numeric.hpp"

namespace blackrt {

namespace {

void validate(const FDConfig& cfg) {
    if (!cfg.terminal) throw std::invalid_argument("fd_oracle: terminal datum missing");
    if (cfg.nx < 32 || cfg.nt < 32) throw std::invalid_argument("fd_oracle: need nx >= 32 and nt >= 32");
    if (!(cfg.x_max > 0.0)) throw std::invalid_argument("fd_oracle: x_max must be positive");
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("fd_oracle: horizon must be positive");
    if (!(cfg.lambda_sq >= 0.0)) throw std::invalid_argument("fd_oracle: |lambda|^2 must be nonnegative");
    if (cfg.coefficient_sweeps < 1) throw std::invalid_argument("fd_oracle: coefficient_sweeps must be >= 1");
}

void check_terminal_shape(const std::vector<double>& r0, double dx) {
    if (std::abs(r0.front()) > 1e-12 * std::max(1.0, std::abs(r0.back())))
        throw std::invalid_argument("fd_oracle: terminal datum must vanish at x = 0");
    for (std::size_t i = 1; i < r0.size(); ++i)
        if (!(r0[i] > r0[i - 1]))
            throw std::invalid_argument("fd_oracle: terminal datum must be strictly increasing (node " +
                                        std::to_string(i) + ")");
    // Truncation sanity: the end slope must match the tail secant to 1%,
    // otherwise the linearity closure misrepresents the far field.
    const std::size_t n = r0.size();
    const std::size_t tail = std::max<std::size_t>(2, n / 10);
    const double secant = (r0[n - 1] - r0[n - 1 - tail]) / (dx * static_cast<double>(tail));
    const double end_slope = (r0[n - 1] - r0[n - 2]) / dx;
    if (std::abs(end_slope - secant) > 0.01 * std::abs(secant))
        throw std::invalid_argument("fd_oracle: terminal datum not close to linear near x_max (grow x_max)");
}

void check_positive(const std::vector<double>& u, bool squared_field, std::size_t step) {
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] < 0.0)
            throw std::runtime_error(std::string("fd_oracle: ") + (squared_field ? "F" : "r") +
                                     " went negative at step " + std::to_string(step) + ", node " +
                                     std::to_string(i));
}

// Thomas elimination; rows 0 and m-1 are already part of the arrays.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, const std::vector<double>& rhs,
                       std::vector<double>& c, std::vector<double>& d, std::vector<double>& u) {
    const std::size_t m = diag.size();
    if (diag[0] == 0.0) throw std::runtime_error("fd_oracle: tridiagonal solve failure at row 0");
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < m; ++i) {
        const double denom = diag[i] - lower[i] * c[i - 1];
        if (denom == 0.0)
            throw std::runtime_error("fd_oracle: tridiagonal solve failure at row " + std::to_string(i));
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    u[m - 1] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) u[i] = d[i] - c[i] * u[i + 1];
}

// Padding past the output window, in log-wealth units. The frozen-tail
// closure error decays like exp(-theta pad) at the pad ends and is further
// damped by the Gaussian spreading factor on the way back to the window, so
// ten units push it well below the scheme error for every admissible datum.
constexpr double kLogPad = 12.0;

struct LogMesh {
    std::vector<double> xi;
    double dxi;
};

LogMesh make_log_mesh(const FDConfig& cfg) {
    const double out_dx = cfg.x_max / static_cast<double>(cfg.nx);
    const double xi_lo = std::log(out_dx) - kLogPad;
    const double xi_hi = std::log(cfg.x_max) + kLogPad;
    LogMesh mesh;
    // Internal resolution tied to nx so grid studies refine the whole scheme.
    const std::size_t m = std::max<std::size_t>(cfg.nx, 64);
    mesh.xi = linspace(xi_lo, xi_hi, m + 1);
    mesh.dxi = mesh.xi[1] - mesh.xi[0];
    return mesh;
}

// March u = r/x (or v = (r/x)^2 for the squared field) over the log mesh.
// Returns the full tau-history, row j = state after j steps.
std::vector<double> march_log(const FDConfig& cfg, const LogMesh& mesh, bool squared_field) {
    const std::size_t m = mesh.xi.size();
    const double dxi = mesh.dxi;
    const double dtau = cfg.horizon / static_cast<double>(cfg.nt);
    const double lsq = cfg.lambda_sq;

    std::vector<double> u(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double x = std::exp(mesh.xi[j]);
        const double rel = cfg.terminal(x) / x;
        u[j] = squared_field ? rel * rel : rel;
    }

    std::vector<double> history((cfg.nt + 1) * m);
    std::copy(u.begin(), u.end(), history.begin());

    std::vector<double> lower(m), diag(m), upper(m), rhs(m), next(m), c(m), d(m);
    for (std::size_t step = 1; step <= cfg.nt; ++step) {
        next = u;
        for (int sweep = 0; sweep < cfg.coefficient_sweeps; ++sweep) {
            for (std::size_t j = 1; j + 1 < m; ++j) {
                const double coeff = 0.5 * lsq * dtau * (squared_field ? next[j] : next[j] * next[j]);
                const double diff = coeff / (dxi * dxi);
                const double adv = coeff / (2.0 * dxi);
                lower[j] = -(diff - adv);
                diag[j] = 1.0 + 2.0 * diff;
                upper[j] = -(diff + adv);
                rhs[j] = u[j];
                if (squared_field) {
                    const double grad = (next[j + 1] - next[j - 1]) / (2.0 * dxi);
                    rhs[j] -= dtau * 0.25 * lsq * grad * grad;
                }
            }
            // Flat tails: homogeneous Neumann at both padded ends.
            lower[0] = 0.0, diag[0] = 1.0, upper[0] = -1.0, rhs[0] = 0.0;
            lower[m - 1] = -1.0, diag[m - 1] = 1.0, upper[m - 1] = 0.0, rhs[m - 1] = 0.0;
            solve_tridiagonal(lower, diag, upper, rhs, c, d, next);
        }
        check_positive(next, squared_field, step);
        u.swap(next);
        std::copy(u.begin(), u.end(), history.begin() + static_cast<std::ptrdiff_t>(step * m));
    }
    return history;
}

// Local cubic (4-point Lagrange) sample of a uniform-mesh profile. The
// stencil clamps at the ends, where s leaves [0,1] but stays inside the
// covered span.
double interp_cubic(const std::vector<double>& xi, const std::vector<double>& f, double dxi, double q) {
    const std::size_t m = xi.size();
    double pos = (q - xi.front()) / dxi;
    std::size_t j = pos <= 1.0 ? 1 : std::min(m - 3, static_cast<std::size_t>(pos));
    const double s = pos - static_cast<double>(j);
    const double fm = f[j - 1], f0 = f[j], f1 = f[j + 1], f2 = f[j + 2];
    return fm * (-s * (s - 1.0) * (s - 2.0) / 6.0) + f0 * ((s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0) +
           f1 * (-(s + 1.0) * s * (s - 2.0) / 2.0) + f2 * ((s + 1.0) * s * (s - 1.0) / 6.0);
}

// Explicit march on the uniform x grid; usable where the stability bound is
// affordable. The far boundary extrapolates with the one-sided zero-curvature
// stencil.
std::vector<double> march_explicit(const FDConfig& cfg, bool squared_field) {
    const std::size_t n = cfg.nx + 1;
    const double dx = cfg.x_max / static_cast<double>(cfg.nx);
    const double dtau = cfg.horizon / static_cast<double>(cfg.nt);
    const double lsq = cfg.lambda_sq;

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = cfg.terminal(dx * static_cast<double>(i));
    check_terminal_shape(u, dx);
    if (squared_field)
        for (double& v : u) v = v * v;

    std::vector<double> history((cfg.nt + 1) * n);
    std::copy(u.begin(), u.end(), history.begin());
    std::vector<double> next(n);

    for (std::size_t step = 1; step <= cfg.nt; ++step) {
        double max_diff = 0.0;
        for (double v : u) max_diff = std::max(max_diff, squared_field ? v : v * v);
        if (lsq > 0.0 && max_diff > 0.0 && dtau > dx * dx / (lsq * max_diff))
            throw std::runtime_error("fd_oracle: explicit stability bound violated at step " +
                                     std::to_string(step));
        next[0] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx);
            double rate = 0.5 * lsq * (squared_field ? u[i] : u[i] * u[i]) * lap;
            if (squared_field) {
                const double grad = (u[i + 1] - u[i - 1]) / (2.0 * dx);
                rate -= 0.25 * lsq * grad * grad;
            }
            next[i] = u[i] + dtau * rate;
        }
        next[n - 1] = (5.0 * next[n - 2] - 4.0 * next[n - 3] + next[n - 4]) / 2.0;
        check_positive(next, squared_field, step);
        u.swap(next);
        std::copy(u.begin(), u.end(), history.begin() + static_cast<std::ptrdiff_t>(step * n));
    }
    return history;
}

// Shared driver: march in tau, then resample onto the uniform x grid with
// calendar-time ordering (row ti corresponds to t = ti dt, terminal last).
std::vector<double> solve_on_output_grid(const FDConfig& cfg, bool squared_field) {
    validate(cfg);
    const std::size_t n = cfg.nx + 1;
    const double dx = cfg.x_max / static_cast<double>(cfg.nx);
    std::vector<double> values((cfg.nt + 1) * n);

    if (cfg.scheme == FDScheme::explicit_euler) {
        const auto history = march_explicit(cfg, squared_field);
        for (std::size_t ti = 0; ti <= cfg.nt; ++ti) {
            const std::size_t tau_i = cfg.nt - ti;
            std::copy(history.begin() + static_cast<std::ptrdiff_t>(tau_i * n),
                      history.begin() + static_cast<std::ptrdiff_t>((tau_i + 1) * n),
                      values.begin() + static_cast<std::ptrdiff_t>(ti * n));
        }
        return values;
    }

    // Validate the sampled terminal on the output grid as well; the log
    // march sees a wider window but the contract is stated here.
    {
        std::vector<double> r0(n);
        for (std::size_t i = 0; i < n; ++i) r0[i] = cfg.terminal(dx * static_cast<double>(i));
        check_terminal_shape(r0, dx);
    }
    const LogMesh mesh = make_log_mesh(cfg);
    const auto history = march_log(cfg, mesh, squared_field);
    const std::size_t m = mesh.xi.size();
    for (std::size_t ti = 0; ti <= cfg.nt; ++ti) {
        const std::size_t tau_i = cfg.nt - ti;
        const double* row = history.data() + tau_i * m;
        std::vector<double> slice(row, row + m);
        double* out = values.data() + ti * n;
        out[0] = 0.0;
        for (std::size_t xi_i = 1; xi_i < n; ++xi_i) {
            const double x = dx * static_cast<double>(xi_i);
            const double rel = interp_cubic(mesh.xi, slice, mesh.dxi, std::log(x));
            out[xi_i] = squared_field ? x * x * rel : x * rel;
        }
    }
    return values;
}

}  // namespace

RTSurface solve_black(const FDConfig& config) {
    auto values = solve_on_output_grid(config, /*squared_field=*/false);
    auto x_grid = linspace(0.0, config.x_max, config.nx + 1);
    auto t_grid = linspace(0.0, config.horizon, config.nt + 1);
    return RTSurface::from_grid(std::move(x_grid), std::move(t_grid), std::move(values),
                                Provenance::finite_difference,
                                MarketParams::from_lambda_sq(config.lambda_sq, config.horizon));
}

FSurface solve_F(const FDConfig& config) {
    FSurface f;
    f.values = solve_on_output_grid(config, /*squared_field=*/true);
    f.x_grid = linspace(0.0, config.x_max, config.nx + 1);
    f.t_grid = linspace(0.0, config.horizon, config.nt + 1);
    f.lambda_sq = config.lambda_sq;
    return f;
}

RTSurface FSurface::sqrt_surface(const MarketParams& market) const {
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) r[i] = std::sqrt(values[i]);
    return RTSurface::from_grid(x_grid, t_grid, std::move(r), Provenance::finite_difference, market);
}

}  // namespace blackrt
