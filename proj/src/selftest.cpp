#include "sqzsync/selftest.hpp"

#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"
#include "sqzsync/limit_cycle.hpp"
#include "sqzsync/metrics.hpp"
#include "sqzsync/sweep.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sqzsync {

namespace {

constexpr double kPi = std::numbers::pi;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53); }

    BlochVector ball() {
        // rejection sample inside the unit ball
        for (;;) {
            BlochVector v{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
            if (v.norm() <= 1.0) return v;
        }
    }

    SystemParams params() {
        SystemParams p;
        p.n = uniform(0.0, 2.0);
        p.r = uniform(0.0, 2.0);
        p.Phi = uniform(0.0, kTwoPi);
        p.Delta = uniform(-3.0, 3.0);
        p.eps = uniform(0.0, 4.0);
        return p;
    }

private:
    std::mt19937_64 engine_;
};

std::string fmt(const char* label, double value) {
    std::ostringstream os;
    os.precision(6);
    os << label << '=' << value;
    return os.str();
}

double max_abs_diff(const BlochVector& a, const BlochVector& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

struct Suite {
    std::vector<CheckResult> results;

    void check(const char* module, const char* name, bool ok, std::string detail) {
        results.push_back({module, name, ok, std::move(detail), false});
    }
    void finding(const char* module, const char* name, std::string detail) {
        results.push_back({module, name, true, std::move(detail), true});
    }
};

void core_types(Suite& s, Rng& rng) {
    double worst_bound = 0.0;
    double worst_vacuum_eq = 0.0;
    double worst_gamma = 0.0;
    double worst_phi = 0.0;
    for (int k = 0; k < 1000; ++k) {
        SystemParams p = rng.params();
        const DerivedReservoir d = derive_reservoir(p);
        worst_bound = std::max(worst_bound, std::norm(d.M) - d.N * (d.N + 1.0));
        worst_gamma = std::max(worst_gamma, std::abs(d.gamma / p.gamma0 - (2.0 * d.N + 1.0)));
        SystemParams q = p;
        q.Phi = wrap_angle(-p.Phi);
        const DerivedReservoir e = derive_reservoir(q);
        worst_phi = std::max({worst_phi, std::abs(e.N - d.N), std::abs(std::abs(e.M) - std::abs(d.M))});
        p.n = 0.0;
        const DerivedReservoir v = derive_reservoir(p);
        const double bound = v.N * (v.N + 1.0);
        if (bound > 0.0) worst_vacuum_eq = std::max(worst_vacuum_eq, std::abs(std::norm(v.M) - bound) / bound);
    }
    s.check("core-types", "|M|^2 <= N(N+1)", worst_bound <= 0.0 || worst_bound < 1e-9, fmt("max excess", worst_bound));
    s.check("core-types", "|M|^2 = N(N+1) at n=0", worst_vacuum_eq <= 1e-12, fmt("max rel dev", worst_vacuum_eq));
    s.check("core-types", "gamma/gamma0 = 2N+1", worst_gamma == 0.0, fmt("max dev", worst_gamma));
    s.check("core-types", "N and |M| even in Phi", worst_phi <= 1e-12, fmt("max dev", worst_phi));

    double worst_rt = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const BlochVector v = rng.ball();
        worst_rt = std::max(worst_rt, max_abs_diff(v, density_to_bloch(bloch_to_density(v))));
    }
    s.check("core-types", "Bloch/density round trip", worst_rt <= 1e-14, fmt("max dev", worst_rt));
}

void bloch_dynamics(Suite& s, Rng& rng) {
    double worst_gen = 0.0;
    double worst_trace = 0.0;
    double worst_oracle = 0.0;
    double worst_eig = -1e300;
    double worst_norm = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SystemParams p = validate_params(rng.params());
        const AffineGenerator g = build_generator(p);
        if (k < 100) {
            const BlochVector r = rng.ball();
            const Matrix2c d = lindblad_rhs_density(p, bloch_to_density(r));
            const BlochVector via_rhs = bloch_components(d);
            worst_gen = std::max(worst_gen, max_abs_diff(via_rhs, BlochVector::from_eigen(g.apply(r.to_eigen()))));
            worst_trace = std::max({worst_trace, std::abs(d.trace()), (d - d.adjoint()).cwiseAbs().maxCoeff()});
        }
        const BlochVector numeric = steady_state_numeric(g);
        worst_oracle = std::max(worst_oracle, max_abs_diff(numeric, steady_state_analytic(p)));
        worst_norm = std::max(worst_norm, numeric.norm());
        const Eigen::EigenSolver<Eigen::Matrix3d> es(g.A, false);
        worst_eig = std::max(worst_eig, es.eigenvalues().real().maxCoeff());
    }
    s.check("bloch-dynamics", "generator matches operator form", worst_gen <= 1e-12, fmt("max dev", worst_gen));
    s.check("bloch-dynamics", "rhs traceless and Hermitian", worst_trace <= 1e-12, fmt("max dev", worst_trace));
    s.check("bloch-dynamics", "closed-form vs linear-solve steady state", worst_oracle <= 1e-8,
            fmt("max dev", worst_oracle));
    s.check("bloch-dynamics", "contractive generator", worst_eig <= 1e-12, fmt("max Re(lambda)", worst_eig));
    s.check("bloch-dynamics", "steady state physical", worst_norm <= 1.0 + 1e-9, fmt("max |r|", worst_norm));

    // RK4 order on vacuum decay, r_z(t) = 2 e^{-t} - 1
    const AffineGenerator vac = build_generator(SystemParams{});
    auto endpoint_error = [&](double dt) {
        const Trajectory tr = integrate(vac, {0, 0, 1}, 1.0, dt);
        return std::abs(tr.states.back().z - (2.0 * std::exp(-1.0) - 1.0));
    };
    const double ratio = endpoint_error(0.1) / endpoint_error(0.05);
    s.check("bloch-dynamics", "RK4 fourth order", ratio >= 14.0, fmt("error ratio", ratio));

    // The closed form only restores gamma0 on |M|^2 in the denominator.
    double worst_g0 = 0.0;
    double worst_g0_transverse = 0.0;
    for (int k = 0; k < 200; ++k) {
        SystemParams p = validate_params(rng.params());
        p.gamma0 = 2.0;
        const BlochVector a = steady_state_analytic(p);
        const BlochVector n = steady_state_numeric(build_generator(p));
        worst_g0 = std::max(worst_g0, std::abs(a.z - n.z));
        worst_g0_transverse = std::max({worst_g0_transverse, std::abs(a.x - n.x), std::abs(a.y - n.y)});
    }
    std::ostringstream os;
    os.precision(6);
    os << "at gamma0=2 the closed-form r_z deviates from the linear solve by up to " << worst_g0
       << " (r_x, r_y deviate by " << worst_g0_transverse
       << "); the closed form is exact only with rates in units of gamma0 (gamma0=1)";
    s.finding("bloch-dynamics", "closed form with gamma0 != 1", os.str());
}

void limit_cycle(Suite& s, Rng& rng) {
    double worst_fp = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double N = rng.uniform(0.0, 50.0);
        worst_fp = std::max(worst_fp, std::abs(std::acos(-1.0 / (2.0 * N + 1.0)) - steady_theta(N)));
    }
    s.check("limit-cycle-sim", "fixed point of angular flow", worst_fp <= 1e-14, fmt("max dev", worst_fp));

    const auto states = sample_initial_states(20, 7);
    EnsembleOptions opt;
    opt.t_end = 20.0;
    opt.dt = 0.01;
    opt.stride = 100;
    SystemParams sq;
    sq.r = 1.5;
    const EnsembleRun a = simulate_ensemble(sq, states, opt, 7);
    const EnsembleRun b = simulate_ensemble(sq, states, opt, 7);
    bool identical = true;
    double max_r2 = 0.0;
    double mean = 0.0;
    std::vector<double> radii;
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        for (std::size_t j = 0; j < a.paths[i].samples.size(); ++j) {
            const auto& pa = a.paths[i].samples[j];
            const auto& pb = b.paths[i].samples[j];
            identical = identical && pa.xy.x == pb.xy.x && pa.xy.y == pb.xy.y;
            max_r2 = std::max(max_r2, pa.xy.x * pa.xy.x + pa.xy.y * pa.xy.y);
        }
        const auto& end = a.paths[i].samples.back().xy;
        radii.push_back(std::hypot(end.x, end.y));
        mean += radii.back();
    }
    mean /= static_cast<double>(radii.size());
    double var = 0.0;
    for (double r : radii) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / static_cast<double>(radii.size()));
    s.check("limit-cycle-sim", "ensemble determinism", identical, identical ? "bit-identical" : "mismatch");
    s.check("limit-cycle-sim", "projection inside unit disk", max_r2 <= 1.0, fmt("max x^2+y^2", max_r2));
    s.check("limit-cycle-sim", "stable limit cycle", sd <= 1e-3, fmt("radius sd", sd));

    const EnsembleRun vac = simulate_ensemble(SystemParams{}, states, opt, 7);
    double vac_max = 0.0;
    for (const auto& path : vac.paths) vac_max = std::max(vac_max, std::hypot(path.samples.back().xy.x, path.samples.back().xy.y));
    s.check("limit-cycle-sim", "vacuum collapses to origin", vac_max <= 1e-3, fmt("max radius", vac_max));
}

void phase_metrics(Suite& s, Rng& rng) {
    double worst_q = 0.0;
    double worst_norm = 0.0;
    double worst_mean = 0.0;
    double worst_s = 0.0;
    for (int k = 0; k < 100; ++k) {
        const BlochVector v = rng.ball();
        const DensityMatrix rho = bloch_to_density(v);
        const double theta = rng.uniform(0.0, kPi);
        const double phi = rng.uniform(0.0, kTwoPi);
        worst_q = std::max(worst_q, std::abs(husimi_q_operator(rho, theta, phi) - husimi_q(v, theta, phi)));
        worst_s = std::max(worst_s, std::abs(sync_measure_integral(rho, phi, 1001) - sync_measure(v, phi)));
        if (k < 10) worst_norm = std::max(worst_norm, std::abs(q_grid(v).integral() - 1.0));
        worst_mean = std::max(worst_mean, std::abs(sync_curve(v).integral()));
    }
    s.check("phase-metrics", "operator and Bloch Q agree", worst_q <= 1e-13, fmt("max dev", worst_q));
    s.check("phase-metrics", "Q normalized", worst_norm <= 1e-6, fmt("max dev", worst_norm));
    s.check("phase-metrics", "S has zero mean", worst_mean <= 1e-10, fmt("max |int S|", worst_mean));
    s.check("phase-metrics", "quadrature S equals closed form", worst_s <= 1e-8, fmt("max dev", worst_s));

    auto smax_at = [](double n, double r) {
        SystemParams p;
        p.n = n;
        p.r = r;
        p.eps = 0.5;
        return s_max(steady_state_vector(p)).s_max;
    };
    const double vac = smax_at(0, 0);
    const double th = smax_at(1, 0);
    const double sqv = smax_at(0, 1.5);
    const double sqt = smax_at(1, 1.5);
    s.check("phase-metrics", "thermal broadening", th < vac, fmt("S_max(1,0)", th));
    s.check("phase-metrics", "squeezing enhancement", sqv > vac && sqt > th, fmt("S_max(1,1.5)", sqt));
}

void sweep_engine(Suite& s, Rng& rng) {
    SystemParams p;
    p.n = 1.0;
    p.r = 1.5;
    const SweepGrid one = arnold_tongue(p, 0.0, 4.0, -3.0, 3.0, 40, 41, 1);
    const SweepGrid many = arnold_tongue(p, 0.0, 4.0, -3.0, 3.0, 40, 41, 3);
    s.check("sweep-engine", "schedule independence", one.values == many.values,
            one.values == many.values ? "bit-identical" : "mismatch");

    double parity = 0.0;
    const std::size_t ny = one.y_axis.values.size();
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < one.x_axis.values.size(); ++ix) {
            parity = std::max(parity, std::abs(one.at(iy, ix) - one.at(ny - 1 - iy, ix)));
        }
    }
    s.check("sweep-engine", "even in detuning", parity <= 1e-12, fmt("max asymmetry", parity));

    bool cells_ok = true;
    for (int k = 0; k < 100; ++k) {
        const auto iy = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(ny)));
        const auto ix = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(one.x_axis.values.size())));
        SystemParams q = p;
        q.eps = one.x_axis.values[std::min(ix, one.x_axis.values.size() - 1)];
        q.Delta = one.y_axis.values[std::min(iy, ny - 1)];
        cells_ok = cells_ok && s_max(steady_state_vector(q)).s_max ==
                                   one.at(std::min(iy, ny - 1), std::min(ix, one.x_axis.values.size() - 1));
    }
    s.check("sweep-engine", "cells match single-point evaluation", cells_ok, cells_ok ? "exact" : "mismatch");
    s.check("sweep-engine", "no flagged cells", one.flagged.empty(), fmt("flagged", static_cast<double>(one.flagged.size())));
}

} // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    Suite suite;
    Rng rng(seed);
    auto guarded = [&](const char* module, auto&& body) {
        try {
            body(suite, rng);
        } catch (const std::exception& e) {
            suite.check(module, "unexpected exception", false, e.what());
        }
    };
    guarded("core-types", core_types);
    guarded("bloch-dynamics", bloch_dynamics);
    guarded("limit-cycle-sim", limit_cycle);
    guarded("phase-metrics", phase_metrics);
    guarded("sweep-engine", sweep_engine);
    return suite.results;
}

} // namespace sqzsync
