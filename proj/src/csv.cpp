#include "blackrt/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blackrt/numeric.hpp"

namespace blackrt {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // fixed newlines across platforms
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void write_rt_surface_csv(const RTSurface& s, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "x,t,r,rx,rxx,rtilde,gamma,residual,provenance\n";
    const char* prov = s.provenance() == Provenance::transform ? "transform" : "fd";
    for (std::size_t ti = 0; ti < s.nt(); ++ti) {
        for (std::size_t xi = 0; xi < s.nx(); ++xi) {
            const double x = s.x_grid()[xi];
            const double r = s.r(xi, ti);
            out << format_double(x) << ',' << format_double(s.t_grid()[ti]) << ',' << format_double(r) << ','
                << format_double(s.r_x(xi, ti)) << ',' << format_double(s.r_xx(xi, ti)) << ',';
            if (x > 0.0)
                out << format_double(r / x) << ',' << format_double(r > 0.0 ? 1.0 / r : 0.0) << ',';
            else
                out << "," << ",";
            const bool interior = ti > 0 && ti + 1 < s.nt() && xi > 0 && xi + 1 < s.nx();
            if (interior) out << format_double(s.black_residual(xi, ti));
            out << ',' << prov << '\n';
        }
    }
}

void write_h_surface_csv(const HeatSurface& surface, std::span<const double> z_grid,
                         std::span<const double> t_grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "z,t,H,Hz,Hzz,Hzzz\n";
    for (double t : t_grid)
        for (double z : z_grid)
            out << format_double(z) << ',' << format_double(t) << ',' << format_double(surface.eval(z, t, 0))
                << ',' << format_double(surface.eval(z, t, 1)) << ',' << format_double(surface.eval(z, t, 2))
                << ',' << format_double(surface.eval(z, t, 3)) << '\n';
}

void write_f_surface_csv(const FSurface& f, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "x,t,F\n";
    for (std::size_t ti = 0; ti < f.t_grid.size(); ++ti)
        for (std::size_t xi = 0; xi < f.x_grid.size(); ++xi)
            out << format_double(f.x_grid[xi]) << ',' << format_double(f.t_grid[ti]) << ','
                << format_double(f.value(xi, ti)) << '\n';
}

void read_r_table_csv(const std::filesystem::path& path, std::vector<double>& x, std::vector<double>& r) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    x.clear();
    r.clear();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        // Tolerate a header row on the first line.
        if (lineno == 1 && line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            x.push_back(std::stod(a));
            r.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    if (x.empty()) throw std::runtime_error(path.string() + ": no samples");
}

}  // namespace blackrt
