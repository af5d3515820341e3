// metrics.hpp: Husimi Q-function, the phase synchronization measure S(phi)
// and the optimal drive strength.

#pragma once

#include "sqzsync/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace sqzsync {

// Q(theta, phi) = [1 + (rx cos phi + ry sin phi) sin theta + rz cos theta] / (4 pi)
double husimi_q(const BlochVector& v, double theta, double phi) noexcept;

// <theta,phi| rho |theta,phi> / (2 pi) with the spin coherent state
// cos(theta/2)|1> + sin(theta/2) e^{i phi}|0>.
double husimi_q_operator(const DensityMatrix& rho, double theta, double phi);

// Uniform theta grid over [0, pi] (endpoints included) and periodic phi
// grid over [0, 2pi). values is row-major, theta index major.
struct PhaseGrid {
    std::vector<double> theta_axis;
    std::vector<double> phi_axis;
    std::vector<double> values;

    double at(std::size_t i_theta, std::size_t i_phi) const { return values[i_theta * phi_axis.size() + i_phi]; }
    // Simpson in theta (with sin theta weight), trapezoid in phi.
    double integral() const;
    // Location of the largest Q value.
    std::pair<std::size_t, std::size_t> argmax() const;
    double max() const;
};

PhaseGrid q_grid(const BlochVector& v, std::size_t n_theta = 181, std::size_t n_phi = 361);

// S(phi) = (rx cos phi + ry sin phi) / 8
double sync_measure(const BlochVector& v, double phi) noexcept;

// S(phi) = int_0^pi sin(theta) Q(theta, phi) dtheta - 1/(2 pi), composite
// Simpson on n_theta points (3/8 closing panel for even counts).
double sync_measure_integral(const DensityMatrix& rho, double phi, std::size_t n_theta = 1001);

struct SyncPeak {
    double s_max = 0.0;
    double phi_star = 0.0;       // 0 when there is no preference
    bool has_preference = false; // false iff rx = ry = 0
};

SyncPeak s_max(const BlochVector& v) noexcept;

struct SyncCurve {
    std::vector<double> phi_axis;
    std::vector<double> s_values;
    double s_max = 0.0;  // max over samples
    double phi_star = 0.0;

    // Periodic trapezoid of S over [0, 2pi).
    double integral() const;
};

SyncCurve sync_curve(const BlochVector& v, std::size_t n_phi = 361);

// Composite Simpson over uniform samples (3/8 rule on the last panel when
// the sample count is even). Needs at least 3 samples.
double simpson(const std::vector<double>& f, double h);

enum class EpsOptMethod { ClosedForm, Numeric };

struct EpsOpt {
    double eps = 0.0;
    double s_max = 0.0;
    EpsOptMethod method = EpsOptMethod::ClosedForm;
};

const char* to_string(EpsOptMethod m) noexcept;

// Closed form sqrt(gamma^2 - 2 gamma gamma0 |M|)/sqrt(2) at Delta = 0,
// Phi = 0 (gamma/sqrt(2) when M = 0); golden-section search otherwise.
// p.eps is ignored.
EpsOpt epsilon_opt(const SystemParams& p);

// Always the closed form; throws InvalidParam unless Delta = 0 and Phi = 0.
double epsilon_opt_closed_form(const SystemParams& p);

// Golden-section maximization of S_max(steady_state_numeric) over
// eps in (0, 10 gamma] to tolerance tol. Throws NoMaximumFound when the
// maximum sits on the bracket edge.
EpsOpt epsilon_opt_numeric(const SystemParams& p, double tol = 1e-6);

} // namespace sqzsync
