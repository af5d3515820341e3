// bloch.hpp: rotating-frame master equation, its affine Bloch form,
// fixed-step RK4 integration and the two steady-state routes.

#pragma once

#include "sqzsync/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sqzsync {

// dr/dt = A r + b
struct AffineGenerator {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& r) const { return A * r + b; }
    // Max absolute row sum.
    double norm_inf() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<BlochVector> states;
};

// Operator form of the master equation:
//   -i/2 [Delta sz + eps sy, rho] - g0 M s+ rho s+ - g0 M* s- rho s-
//   + g0 (N+1) D[s-] rho + g0 N D[s+] rho
// with D[L] rho = L rho L^+ - {L^+ L, rho}/2.
Matrix2c lindblad_rhs_density(const SystemParams& p, const DensityMatrix& rho);

// Built by applying lindblad_rhs_density to rho(0) and rho(e_k).
AffineGenerator build_generator(const SystemParams& p);

// Default step 0.01 / max(gamma, 1), in units of 1/gamma0.
double default_step(const SystemParams& p);

// Classical RK4. The run is split into ceil(t_end/dt) equal steps so the
// last sample sits exactly at t_end. Throws StepTooLarge if
// dt * ||A||_inf > 1 and InvalidParam for non-positive dt or t_end.
Trajectory integrate(const AffineGenerator& g, const BlochVector& r0, double t_end, double dt);

// Solves A r = -b with partial-pivot LU. Throws SingularGenerator when
// |det A| < 1e-14 ||A||^3.
BlochVector steady_state_numeric(const AffineGenerator& g);

// Closed-form stationary Bloch vector, evaluated exactly as published
// (the r_z numerator carries |M|^2 without a gamma0^2 factor, so the
// result only matches the linear solve for gamma0 = 1). Throws
// DegenerateDenominator when the shared denominator vanishes.
BlochVector steady_state_analytic(const SystemParams& p);

struct SteadyState {
    BlochVector v;
    bool used_fallback = false; // analytic failed, numeric used
    double discrepancy = 0.0;   // max |analytic - numeric| component
};

// Analytic first, numeric on DegenerateDenominator. Always also computes
// the numeric route so callers can flag disagreement.
SteadyState steady_state(const SystemParams& p);

// Convenience: analytic with numeric fallback, vector only.
BlochVector steady_state_vector(const SystemParams& p);

} // namespace sqzsync
