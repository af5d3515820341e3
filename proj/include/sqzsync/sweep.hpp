// sweep.hpp: 2-D parameter scans over steady states (S(phi) maps and
// Arnold tongues), evaluated in parallel with index-ordered assembly.

#pragma once

#include "sqzsync/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace sqzsync {

struct Axis {
    std::string name;
    std::vector<double> values;
};

// Inclusive uniform grid, exactly antisymmetric when lo = -hi.
std::vector<double> linspace(double lo, double hi, std::size_t n);
// [0, 2pi) with n points.
std::vector<double> periodic_axis(std::size_t n);

// Column-wide flag for S(phi) maps, where one steady state feeds a column.
inline constexpr std::size_t kAllRows = static_cast<std::size_t>(-1);

struct FlaggedCell {
    std::size_t ix = 0;
    std::size_t iy = kAllRows;
    double discrepancy = 0.0;
    bool used_fallback = false;
};

struct SweepGrid {
    std::string kind; // "s_vs_eps", "s_vs_delta", "tongue"
    Axis x_axis;
    Axis y_axis;
    std::vector<double> values; // |y| x |x|, row-major in y
    SystemParams fixed;
    std::vector<FlaggedCell> flagged;

    double at(std::size_t iy, std::size_t ix) const { return values[iy * x_axis.values.size() + ix]; }
    double max() const;
    // (iy, ix) of the largest value, first in row-major order on ties.
    std::pair<std::size_t, std::size_t> argmax() const;
};

// Cells where analytic and numeric steady states differ by more than
// this are reported in SweepGrid::flagged.
inline constexpr double kFlagTolerance = 1e-6;

// 0 means hardware concurrency.
std::size_t resolve_workers(std::size_t requested) noexcept;

// values[phi_i][eps_j] = S(phi_i) at the steady state with eps = eps_j.
SweepGrid sweep_s_vs_eps(const SystemParams& p, double eps_min, double eps_max, std::size_t n_eps,
                         std::size_t n_phi, std::size_t workers = 0);

// values[phi_i][Delta_j] = S(phi_i) at the steady state with Delta = Delta_j.
SweepGrid sweep_s_vs_delta(const SystemParams& p, double delta_min, double delta_max, std::size_t n_delta,
                           std::size_t n_phi, std::size_t workers = 0);

// values[Delta_i][eps_j] = S_max at the steady state.
SweepGrid arnold_tongue(const SystemParams& p, double eps_min, double eps_max, double delta_min, double delta_max,
                        std::size_t n_eps, std::size_t n_delta, std::size_t workers = 0);

} // namespace sqzsync
