#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "blackrt/fd_oracle.hpp"
#include "blackrt/heat_engine.hpp"
#include "blackrt/rt_transform.hpp"

namespace blackrt {

// All numeric cells use the shortest round-trip decimal representation of
// the underlying binary64 value, so identical runs are byte-identical.

// Header: x,t,r,rx,rxx,rtilde,gamma,residual,provenance. The residual cell is
// empty on grid-boundary rows where the defect meter is undefined.
void write_rt_surface_csv(const RTSurface& s, const std::filesystem::path& path);

// Header: z,t,H,Hz,Hzz,Hzzz.
void write_h_surface_csv(const HeatSurface& surface, std::span<const double> z_grid,
                         std::span<const double> t_grid, const std::filesystem::path& path);

// Header: x,t,F.
void write_f_surface_csv(const FSurface& f, const std::filesystem::path& path);

// Two-column x,R loader for tabulated terminal data (strictly increasing columns).
void read_r_table_csv(const std::filesystem::path& path, std::vector<double>& x, std::vector<double>& r);

}  // namespace blackrt
