#include "sqzsync/limit_cycle.hpp"

#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sqzsync {

namespace {

constexpr double kPi = std::numbers::pi;
// Largest theta change accepted from one RK4 step before it is halved.
constexpr double kMaxThetaStep = 0.05;
constexpr int kMaxHalvings = 20;

double uniform01(std::mt19937_64& rng) {
    // 53 random mantissa bits; portable across standard libraries.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double clamp_theta(double theta, bool& clamped) {
    const double lo = kPoleGuard;
    const double hi = kPi - kPoleGuard;
    if (theta < lo) {
        clamped = true;
        return lo;
    }
    if (theta > hi) {
        clamped = true;
        return hi;
    }
    return theta;
}

struct AngularStepper {
    const SystemParams& p;
    double omega0;
    bool clamped = false;

    AngularRate eval(AngularState s, double t) {
        s.theta = clamp_theta(s.theta, clamped);
        return angular_rhs(p, s, t, omega0);
    }

    AngularState step(const AngularState& s, double t, double h, int depth) {
        const AngularRate k1 = eval(s, t);
        const AngularRate k2 = eval({s.theta + 0.5 * h * k1.dtheta, s.phi + 0.5 * h * k1.dphi}, t + 0.5 * h);
        const AngularRate k3 = eval({s.theta + 0.5 * h * k2.dtheta, s.phi + 0.5 * h * k2.dphi}, t + 0.5 * h);
        const AngularRate k4 = eval({s.theta + h * k3.dtheta, s.phi + h * k3.dphi}, t + h);
        const double dtheta = (h / 6.0) * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
        const double dphi = (h / 6.0) * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);

        if ((!std::isfinite(dtheta) || std::abs(dtheta) > kMaxThetaStep) && depth < kMaxHalvings) {
            const AngularState mid = step(s, t, 0.5 * h, depth + 1);
            return step(mid, t + 0.5 * h, 0.5 * h, depth + 1);
        }
        return {clamp_theta(s.theta + dtheta, clamped), wrap_angle(s.phi + dphi)};
    }
};

PathSample make_sample(double t, const AngularState& s) { return {t, s, project_xy(s)}; }

std::size_t step_count(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParam("dt", dt, "step must be > 0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidParam("t_end", t_end, "end time must be > 0");
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt * (1.0 - 1e-12)));
    return std::max<std::size_t>(steps, 1);
}

bool record_step(std::size_t k, std::size_t n, std::size_t stride) { return k % stride == 0 || k == n; }

} // namespace

std::size_t EnsembleRun::clamped_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(paths.begin(), paths.end(), [](const EnsemblePath& p) { return p.clamped; }));
}

double steady_theta(double N) {
    if (!(N >= 0.0)) throw InvalidParam("N", N, "effective occupation must be >= 0");
    return std::acos(-1.0 / (2.0 * N + 1.0));
}

double limit_cycle_radius(double theta_s) { return 0.5 * (1.0 + std::cos(theta_s)); }

AngularRate angular_rhs(const SystemParams& p, const AngularState& s, double t, double omega0) {
    if (!(s.theta >= kPoleGuard && s.theta <= kPi - kPoleGuard)) {
        throw Error(ErrorKind::PoleSingularity, "theta is within the pole guard of 0 or pi");
    }
    const DerivedReservoir d = derive_reservoir(p);
    const double g0 = p.gamma0;
    const double sin_t = std::sin(s.theta);
    const double cot_t = std::cos(s.theta) / sin_t;
    const double omega_l = omega0 + p.Delta;
    const double drive = 2.0 * p.eps * std::cos(omega_l * t + 0.5 * kPi);

    AngularRate rate;
    rate.dtheta = g0 / sin_t + d.gamma * cot_t - drive * std::sin(s.phi);
    rate.dphi = omega0 + g0 * d.M.imag() * std::cos(2.0 * s.phi) + g0 * d.M.real() * std::sin(2.0 * s.phi)
                - drive * std::cos(s.phi) * cot_t;
    return rate;
}

std::vector<AngularState> sample_initial_states(std::size_t count, std::uint64_t seed) {
    if (count < 1) throw InvalidParam("count", 0.0, "need at least one initial state");
    std::mt19937_64 rng(seed);
    std::vector<AngularState> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double u = uniform01(rng);
        const double v = uniform01(rng);
        out.push_back({std::acos(1.0 - 2.0 * u), kTwoPi * v});
    }
    return out;
}

EnsembleRun simulate_ensemble(const SystemParams& p, const std::vector<AngularState>& states,
                              const EnsembleOptions& opt, std::uint64_t seed) {
    const std::size_t n = step_count(opt.t_end, opt.dt);
    const std::size_t stride = std::max<std::size_t>(opt.stride, 1);
    const double h = opt.t_end / static_cast<double>(n);

    EnsembleRun run;
    run.seed = seed;
    run.initial_states = states;
    run.paths.reserve(states.size());

    if (p.eps == 0.0) {
        for (const AngularState& s0 : states) {
            AngularStepper stepper{p, opt.omega0};
            EnsemblePath path;
            AngularState s{clamp_theta(s0.theta, stepper.clamped), wrap_angle(s0.phi)};
            path.samples.push_back(make_sample(0.0, s));
            for (std::size_t k = 1; k <= n; ++k) {
                const double t0 = static_cast<double>(k - 1) * h;
                s = stepper.step(s, t0, h, 0);
                if (record_step(k, n, stride)) path.samples.push_back(make_sample(static_cast<double>(k) * h, s));
            }
            path.clamped = stepper.clamped;
            run.paths.push_back(std::move(path));
        }
        return run;
    }

    const AffineGenerator g = build_generator(p);
    for (const AngularState& s0 : states) {
        const BlochVector r0{std::sin(s0.theta) * std::cos(s0.phi), std::sin(s0.theta) * std::sin(s0.phi),
                             std::cos(s0.theta)};
        const Trajectory traj = integrate(g, r0, opt.t_end, opt.dt);
        EnsemblePath path;
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            if (k != 0 && !record_step(k, traj.states.size() - 1, stride)) continue;
            const BlochVector& r = traj.states[k];
            const AngularState s{std::acos(std::clamp(r.z, -1.0, 1.0)), wrap_angle(std::atan2(r.y, r.x))};
            path.samples.push_back(make_sample(traj.times[k], s));
        }
        run.paths.push_back(std::move(path));
    }
    return run;
}

PlanarPoint project_xy(const AngularState& s) noexcept {
    const double rho = 0.5 * (1.0 + std::cos(s.theta));
    return {rho * std::cos(s.phi), rho * std::sin(s.phi)};
}

} // namespace sqzsync
