#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"
#include "sqzsync/limit_cycle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sqzsync;

namespace {
constexpr double kPi = std::numbers::pi;
// mpmath: arccos(-1/(2N+1)) at N = sinh^2(1.5)
constexpr double kThetaS = 1.670288312472600497;
constexpr double kRadiusS = 0.4503360362902833961;

double radius(const PathSample& s) { return std::hypot(s.xy.x, s.xy.y); }
} // namespace

TEST_SUITE("limit_cycle") {

TEST_CASE("steady_theta") {
    CHECK(steady_theta(0.0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(steady_theta(1e12) == doctest::Approx(kPi / 2).epsilon(1e-12));
    SystemParams p;
    p.r = 1.5;
    CHECK(steady_theta(derive_reservoir(p).N) == doctest::Approx(kThetaS).epsilon(1e-14));
    CHECK_THROWS_AS(steady_theta(-1.0), InvalidParam);
}

TEST_CASE("limit_cycle_radius") {
    CHECK(limit_cycle_radius(kPi) == 0.0);
    CHECK(limit_cycle_radius(kPi / 2) == doctest::Approx(0.5));
    CHECK(limit_cycle_radius(kThetaS) == doctest::Approx(kRadiusS).epsilon(1e-14));
}

TEST_CASE("angular_rhs fixed point and free precession") {
    SystemParams p;
    p.r = 1.5;
    const double theta_s = steady_theta(derive_reservoir(p).N);
    CHECK(std::abs(angular_rhs(p, {theta_s, 0.3}, 0.0).dtheta) <= 1e-12);

    // phi = 0, Phi = 0: Im M = 0 and sin(2 phi) = 0, only omega0 survives
    CHECK(angular_rhs(p, {1.0, 0.0}, 0.0, 0.7).dphi == doctest::Approx(0.7));

    SystemParams thermal;
    thermal.n = 0.5;
    const AngularRate r = angular_rhs(thermal, {1.2, 2.0}, 3.0, 1.3);
    CHECK(r.dphi == doctest::Approx(1.3));
}

TEST_CASE("angular_rhs zero of dtheta matches arccos(-gamma0/gamma)") {
    for (double N : {0.01, 0.3, 1.0, 4.5, 30.0}) {
        SystemParams p;
        p.n = N; // r = 0 gives N = n
        const double theta = std::acos(-p.gamma0 / derive_reservoir(p).gamma);
        CHECK(std::abs(theta - steady_theta(N)) <= 1e-14);
        CHECK(std::abs(angular_rhs(p, {theta, 0.0}, 0.0).dtheta) <= 1e-12);
    }
}

TEST_CASE("angular_rhs drive term") {
    SystemParams p;
    p.eps = 0.5;
    // cos(omega_L t + pi/2) = -sin(omega_L t); at t = 0 the drive vanishes
    const AngularRate at0 = angular_rhs(p, {1.0, 0.4}, 0.0, 2.0);
    const AngularRate free = angular_rhs(SystemParams{}, {1.0, 0.4}, 0.0, 2.0);
    CHECK(at0.dtheta == doctest::Approx(free.dtheta).epsilon(1e-15));
    const double t = 0.3;
    const double drive = 2.0 * 0.5 * std::cos(2.0 * t + kPi / 2);
    const AngularRate at_t = angular_rhs(p, {1.0, 0.4}, t, 2.0);
    CHECK(at_t.dtheta == doctest::Approx(free.dtheta - drive * std::sin(0.4)));
}

TEST_CASE("angular_rhs rejects poles") {
    try {
        angular_rhs(SystemParams{}, {0.0, 0.0}, 0.0);
        FAIL("expected PoleSingularity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PoleSingularity);
    }
    CHECK_THROWS_AS(angular_rhs(SystemParams{}, {kPi - 1e-8, 0.0}, 0.0), Error);
}

TEST_CASE("sample_initial_states is reproducible and uniform") {
    const auto a = sample_initial_states(200, 42);
    const auto b = sample_initial_states(200, 42);
    REQUIRE(a.size() == 200);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].theta == b[k].theta);
        CHECK(a[k].phi == b[k].phi);
        CHECK(a[k].theta >= 0.0);
        CHECK(a[k].theta <= kPi);
        CHECK(a[k].phi >= 0.0);
        CHECK(a[k].phi < 2.0 * kPi);
    }
    CHECK(sample_initial_states(200, 43)[0].theta != a[0].theta);

    const std::size_t n = 100000;
    const auto big = sample_initial_states(n, 1);
    double cos_theta = 0.0;
    double cos_phi = 0.0;
    for (const auto& s : big) {
        cos_theta += std::cos(s.theta);
        cos_phi += std::cos(s.phi);
    }
    cos_theta /= static_cast<double>(n);
    cos_phi /= static_cast<double>(n);
    // Var(cos theta) = 1/3 for a uniform sphere, Var(cos phi) = 1/2
    CHECK(std::abs(cos_theta) <= 3.0 * std::sqrt(1.0 / 3.0 / static_cast<double>(n)));
    CHECK(std::abs(cos_phi) <= 3.0 * std::sqrt(0.5 / static_cast<double>(n)));
    CHECK_THROWS_AS(sample_initial_states(0, 1), InvalidParam);
}

TEST_CASE("vacuum ensemble collapses to the origin") {
    EnsembleOptions opt;
    opt.stride = 100;
    const EnsembleRun run = simulate_ensemble(SystemParams{}, sample_initial_states(200, 42), opt, 42);
    REQUIRE(run.paths.size() == 200);
    for (const auto& path : run.paths) {
        CHECK(radius(path.samples.back()) <= 1e-3);
        CHECK(path.samples.back().t == doctest::Approx(20.0));
    }
}

TEST_CASE("squeezed vacuum ensemble settles on the limit cycle") {
    SystemParams p;
    p.r = 1.5;
    EnsembleOptions opt;
    opt.stride = 100;
    const EnsembleRun run = simulate_ensemble(p, sample_initial_states(200, 42), opt, 42);
    for (const auto& path : run.paths) {
        CHECK(std::abs(radius(path.samples.back()) - kRadiusS) <= 1e-3);
        for (const auto& s : path.samples) CHECK(s.xy.x * s.xy.x + s.xy.y * s.xy.y <= 1.0);
    }
}

TEST_CASE("a state on the cycle stays there") {
    SystemParams p;
    p.r = 1.5;
    const double theta_s = steady_theta(derive_reservoir(p).N);
    EnsembleOptions opt;
    const EnsembleRun run = simulate_ensemble(p, {{theta_s, 1.0}}, opt);
    for (const auto& s : run.paths[0].samples) {
        CHECK(std::abs(radius(s) - limit_cycle_radius(theta_s)) <= 1e-9);
    }
    CHECK_FALSE(run.paths[0].clamped);
}

TEST_CASE("ensemble runs are deterministic") {
    SystemParams p;
    p.n = 0.3;
    p.r = 0.8;
    p.Phi = 1.0;
    EnsembleOptions opt;
    opt.t_end = 5.0;
    opt.stride = 7;
    const auto states = sample_initial_states(30, 9);
    const EnsembleRun a = simulate_ensemble(p, states, opt, 9);
    const EnsembleRun b = simulate_ensemble(p, states, opt, 9);
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        REQUIRE(a.paths[i].samples.size() == b.paths[i].samples.size());
        for (std::size_t j = 0; j < a.paths[i].samples.size(); ++j) {
            CHECK(a.paths[i].samples[j].s.theta == b.paths[i].samples[j].s.theta);
            CHECK(a.paths[i].samples[j].s.phi == b.paths[i].samples[j].s.phi);
        }
    }
}

TEST_CASE("stride thins the record but keeps endpoints") {
    EnsembleOptions opt;
    opt.t_end = 1.0;
    opt.dt = 0.01;
    opt.stride = 30;
    const EnsembleRun run = simulate_ensemble(SystemParams{}, {{1.0, 0.0}}, opt);
    // steps 0, 30, 60, 90 and the final step 100
    CHECK(run.paths[0].samples.size() == 5);
    CHECK(run.paths[0].samples.back().t == doctest::Approx(1.0));
}

TEST_CASE("starting on a pole is clamped and flagged") {
    EnsembleOptions opt;
    opt.t_end = 1.0;
    const EnsembleRun run = simulate_ensemble(SystemParams{}, {{0.0, 0.0}}, opt);
    CHECK(run.paths[0].clamped);
    CHECK(run.clamped_count() == 1);
    for (const auto& s : run.paths[0].samples) CHECK(std::isfinite(s.s.theta));
}

TEST_CASE("driven ensembles go through the Bloch generator") {
    SystemParams p;
    p.r = 1.5;
    p.eps = 0.5;
    EnsembleOptions opt;
    // slowest Bloch relaxation rate here is about 0.05
    opt.t_end = 1200.0;
    opt.dt = 0.01;
    opt.stride = 10000;
    const EnsembleRun run = simulate_ensemble(p, sample_initial_states(5, 3), opt);
    const BlochVector ss = steady_state_numeric(build_generator(p));
    for (const auto& path : run.paths) {
        const AngularState end = path.samples.back().s;
        CHECK(std::cos(end.theta) == doctest::Approx(ss.z).epsilon(1e-8));
        CHECK(end.phi == doctest::Approx(kPi).epsilon(1e-8));
    }
}

TEST_CASE("project_xy") {
    const PlanarPoint south = project_xy({kPi, 1.234});
    CHECK(std::abs(south.x) <= 1e-16);
    CHECK(std::abs(south.y) <= 1e-16);
    const PlanarPoint north = project_xy({0.0, 0.0});
    CHECK(north.x == 1.0);
    CHECK(north.y == 0.0);
    const PlanarPoint on_cycle = project_xy({kThetaS, kPi / 3});
    CHECK(on_cycle.x == doctest::Approx(0.2251680181451416980).epsilon(1e-14));
    CHECK(on_cycle.y == doctest::Approx(0.3900024476669762940).epsilon(1e-14));
}

} // TEST_SUITE
