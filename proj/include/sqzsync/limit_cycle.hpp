// limit_cycle.hpp: undriven angular dynamics of the Bloch vector, the
// stationary polar angle, seeded random ensembles and the planar projection
// used for phase portraits.

#pragma once

#include "sqzsync/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace sqzsync {

inline constexpr double kPoleGuard = 1e-6;

struct AngularState {
    double theta = 0.0; // [0, pi]
    double phi = 0.0;   // [0, 2pi)
};

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

struct PathSample {
    double t = 0.0;
    AngularState s;
    PlanarPoint xy;
};

struct EnsemblePath {
    std::vector<PathSample> samples;
    bool clamped = false; // theta hit the pole guard at least once
};

struct EnsembleRun {
    std::uint64_t seed = 0;
    std::vector<AngularState> initial_states;
    std::vector<EnsemblePath> paths;

    std::size_t clamped_count() const noexcept;
};

struct EnsembleOptions {
    double t_end = 20.0;
    double dt = 0.01;
    double omega0 = 0.0;      // free precession frequency in the phi equation
    std::size_t stride = 1;   // record every stride-th step (the final step is always recorded)
};

// arccos(-1/(2N+1)).
double steady_theta(double N);

// (1 + cos theta_s)/2.
double limit_cycle_radius(double theta_s);

struct AngularRate {
    double dtheta = 0.0;
    double dphi = 0.0;
};

// Angular equations of motion with explicit drive cos(omega_L t + pi/2),
// omega_L = omega0 + Delta. Throws PoleSingularity within kPoleGuard of a pole.
AngularRate angular_rhs(const SystemParams& p, const AngularState& s, double t, double omega0 = 0.0);

// theta = arccos(1 - 2u), phi = 2 pi v from a seeded mt19937_64.
std::vector<AngularState> sample_initial_states(std::size_t count, std::uint64_t seed);

// eps = 0 integrates the angular equations with RK4 and pole clamping.
// eps != 0 is delegated to the Bloch generator, starting each member from
// the pure state at (theta, phi) and reading angles back as
// theta = arccos(r_z), phi = arg(r_x + i r_y).
EnsembleRun simulate_ensemble(const SystemParams& p, const std::vector<AngularState>& states,
                              const EnsembleOptions& opt, std::uint64_t seed = 0);

PlanarPoint project_xy(const AngularState& s) noexcept;

} // namespace sqzsync
