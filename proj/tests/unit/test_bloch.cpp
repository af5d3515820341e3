#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace sqzsync;

namespace {

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SystemParams p;
    p.n = 2.0 * u(rng);
    p.r = 2.0 * u(rng);
    p.Phi = kTwoPi * u(rng);
    p.Delta = -3.0 + 6.0 * u(rng);
    p.eps = 4.0 * u(rng);
    return p;
}

BlochVector random_ball(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        BlochVector v{u(rng), u(rng), u(rng)};
        if (v.norm() <= 1.0) return v;
    }
}

double max_diff(const BlochVector& a, const BlochVector& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

// Closed form with gamma0 restored on |M|^2 in the r_z numerator; test-only.
BlochVector analytic_with_gamma0(const SystemParams& p) {
    const DerivedReservoir d = derive_reservoir(p);
    const double g0 = p.gamma0, g = d.gamma, m2 = std::norm(d.M);
    const double den = g * (4.0 * (g0 * g0 * m2 - p.Delta * p.Delta) - g * g) +
                       2.0 * p.eps * p.eps * (2.0 * g0 * d.M.real() - g);
    return {2.0 * g0 * p.eps * (g - 2.0 * g0 * d.M.real()) / den,
            4.0 * g0 * p.eps * (p.Delta + g0 * d.M.imag()) / den,
            -g0 * (4.0 * (g0 * g0 * m2 - p.Delta * p.Delta) - g * g) / den};
}

} // namespace

TEST_SUITE("bloch") {

TEST_CASE("lindblad_rhs_density in vacuum") {
    const SystemParams vac;
    Matrix2c ground = Matrix2c::Zero();
    ground(1, 1) = 1.0;
    CHECK(lindblad_rhs_density(vac, DensityMatrix(ground)).cwiseAbs().maxCoeff() == 0.0);

    Matrix2c excited = Matrix2c::Zero();
    excited(0, 0) = 1.0;
    const Matrix2c d = lindblad_rhs_density(vac, DensityMatrix(excited));
    CHECK(d(0, 0).real() == doctest::Approx(-1.0));
    CHECK(d(1, 1).real() == doctest::Approx(1.0));
}

TEST_CASE("lindblad_rhs_density vanishes at the steady state") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        SystemParams p = validate_params(random_params(rng));
        p.eps = 0.0;
        const BlochVector ss = steady_state_numeric(build_generator(p));
        CHECK(lindblad_rhs_density(p, bloch_to_density(ss)).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("lindblad_rhs_density output is traceless and Hermitian") {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 200; ++k) {
        const SystemParams p = validate_params(random_params(rng));
        const Matrix2c d = lindblad_rhs_density(p, bloch_to_density(random_ball(rng)));
        CHECK(std::abs(d.trace()) <= 1e-12);
        CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("build_generator reproduces amplitude damping in vacuum") {
    const AffineGenerator g = build_generator(SystemParams{});
    Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
    expected.diagonal() << -0.5, -0.5, -1.0;
    CHECK((g.A - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((g.b - Eigen::Vector3d(0, 0, -1)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("build_generator agrees with the operator form on random states") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const SystemParams p = validate_params(random_params(rng));
        const AffineGenerator g = build_generator(p);
        const BlochVector r = random_ball(rng);
        const BlochVector via_rhs = bloch_components(lindblad_rhs_density(p, bloch_to_density(r)));
        CHECK(max_diff(via_rhs, BlochVector::from_eigen(g.apply(r.to_eigen()))) <= 1e-12);
    }
}

TEST_CASE("undriven squeezed vacuum relaxes to r_z = -1/(2N+1)") {
    SystemParams p;
    p.r = 1.5;
    const BlochVector ss = steady_state_numeric(build_generator(p));
    CHECK(ss.z == doctest::Approx(-0.0993278).epsilon(1e-6));
    CHECK(ss.z == doctest::Approx(-1.0 / (2.0 * derive_reservoir(p).N + 1.0)).epsilon(1e-13));
}

TEST_CASE("integrate: zero generator keeps the state") {
    const AffineGenerator zero;
    const Trajectory tr = integrate(zero, {0.1, 0.2, 0.3}, 1.0, 0.1);
    CHECK(tr.times.size() == 11);
    for (const auto& s : tr.states) {
        CHECK(s.x == 0.1);
        CHECK(s.y == 0.2);
        CHECK(s.z == 0.3);
    }
    CHECK(tr.times.back() == 1.0);
}

TEST_CASE("integrate: vacuum decay follows 2 e^{-t} - 1") {
    const Trajectory tr = integrate(build_generator(SystemParams{}), {0, 0, 1}, 1.0, 0.01);
    CHECK(tr.states.back().z == doctest::Approx(-0.2642411176571153568).epsilon(1e-10));
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
}

TEST_CASE("integrate: RK4 error drops ~16x when the step halves") {
    const AffineGenerator g = build_generator(SystemParams{});
    const double exact = 2.0 * std::exp(-1.0) - 1.0;
    const double e1 = std::abs(integrate(g, {0, 0, 1}, 1.0, 0.1).states.back().z - exact);
    const double e2 = std::abs(integrate(g, {0, 0, 1}, 1.0, 0.05).states.back().z - exact);
    CHECK(e1 / e2 >= 14.0);
    CHECK(e1 / e2 <= 18.0);
}

TEST_CASE("integrate: contraction to the unique fixed point") {
    std::mt19937_64 rng(8);
    SystemParams p;
    double rate = 0.0;
    do {
        p = validate_params(random_params(rng));
        rate = build_generator(p).A.eigenvalues().real().cwiseAbs().minCoeff();
    } while (rate < 0.05);
    const AffineGenerator g = build_generator(p);
    const BlochVector ss = steady_state_numeric(g);
    for (int k = 0; k < 10; ++k) {
        const Trajectory tr = integrate(g, random_ball(rng), 25.0 / rate, default_step(p));
        CHECK(max_diff(tr.states.back(), ss) <= 1e-6);
        for (const auto& s : tr.states) CHECK(s.norm() <= 1.0 + 1e-6);
    }
}

TEST_CASE("integrate: guards") {
    const AffineGenerator g = build_generator(SystemParams{});
    CHECK_THROWS_AS(integrate(g, {}, 1.0, 0.0), InvalidParam);
    CHECK_THROWS_AS(integrate(g, {}, -1.0, 0.1), InvalidParam);
    try {
        integrate(g, {}, 10.0, 2.0);
        FAIL("expected StepTooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StepTooLarge);
    }
}

TEST_CASE("steady_state_numeric examples") {
    const BlochVector vac = steady_state_numeric(build_generator(SystemParams{}));
    CHECK(vac.x == doctest::Approx(0.0));
    CHECK(vac.z == doctest::Approx(-1.0));

    SystemParams driven;
    driven.eps = 0.5;
    const BlochVector d = steady_state_numeric(build_generator(driven));
    CHECK(d.x == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(d.y == doctest::Approx(0.0));
    CHECK(d.z == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    // long-time integration agrees
    const Trajectory tr = integrate(build_generator(driven), {}, 60.0, 0.01);
    CHECK(max_diff(tr.states.back(), d) <= 1e-9);

    SystemParams sq;
    sq.r = 1.5;
    sq.eps = 0.5;
    const BlochVector s = steady_state_numeric(build_generator(sq));
    CHECK(s.x == doctest::Approx(-0.99876215806336422).epsilon(1e-12));
    CHECK(std::abs(s.y) <= 1e-15);
}

TEST_CASE("steady_state_numeric rejects a singular generator") {
    AffineGenerator g; // A = 0
    try {
        steady_state_numeric(g);
        FAIL("expected SingularGenerator");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularGenerator);
    }
}

TEST_CASE("steady_state_analytic examples") {
    const BlochVector vac = steady_state_analytic(SystemParams{});
    CHECK(vac.x == 0.0);
    CHECK(vac.z == doctest::Approx(-1.0));

    SystemParams p;
    p.eps = 0.5;
    p.Delta = 0.5;
    const BlochVector d = steady_state_analytic(p);
    CHECK(d.x == doctest::Approx(-0.4));
    CHECK(d.y == doctest::Approx(-0.4));
    CHECK(d.z == doctest::Approx(-0.8));
    CHECK(max_diff(d, steady_state_numeric(build_generator(p))) <= 1e-14);

    // r_x = -2 eps/(1 + 2 eps^2) in vacuum at resonance, maximal at eps = 1/sqrt(2)
    SystemParams opt;
    opt.eps = 1.0 / std::sqrt(2.0);
    const BlochVector o = steady_state_analytic(opt);
    CHECK(o.x == doctest::Approx(-2.0 * opt.eps / (1.0 + 2.0 * opt.eps * opt.eps)));
    CHECK(std::hypot(o.x, o.y) / 8.0 == doctest::Approx(std::sqrt(2.0) / 16.0).epsilon(1e-14));
}

TEST_CASE("closed form and linear solve agree on random parameters") {
    std::mt19937_64 rng(9);
    double worst = 0.0;
    double worst_eig = -1.0;
    for (int k = 0; k < 1000; ++k) {
        const SystemParams p = validate_params(random_params(rng));
        const AffineGenerator g = build_generator(p);
        const BlochVector n = steady_state_numeric(g);
        worst = std::max(worst, max_diff(n, steady_state_analytic(p)));
        CHECK(n.norm() <= 1.0 + 1e-9);
        const Eigen::EigenSolver<Eigen::Matrix3d> es(g.A, false);
        worst_eig = std::max(worst_eig, es.eigenvalues().real().maxCoeff());
        CHECK((g.A * n.to_eigen() + g.b).norm() <= 1e-12);
    }
    CHECK(worst <= 1e-8);
    CHECK(worst_eig <= 1e-12);
}

TEST_CASE("closed form r_z needs gamma0 = 1") {
    std::mt19937_64 rng(10);
    double verbatim_dev = 0.0;
    double restored_dev = 0.0;
    double transverse_dev = 0.0;
    for (int k = 0; k < 200; ++k) {
        SystemParams p = validate_params(random_params(rng));
        p.gamma0 = 2.0;
        const BlochVector n = steady_state_numeric(build_generator(p));
        const BlochVector a = steady_state_analytic(p);
        verbatim_dev = std::max(verbatim_dev, std::abs(a.z - n.z));
        transverse_dev = std::max({transverse_dev, std::abs(a.x - n.x), std::abs(a.y - n.y)});
        restored_dev = std::max(restored_dev, max_diff(analytic_with_gamma0(p), n));
    }
    CHECK(verbatim_dev > 1e-3);
    CHECK(transverse_dev <= 1e-10);
    CHECK(restored_dev <= 1e-10);
}

TEST_CASE("steady_state reports the route and discrepancy") {
    SystemParams p;
    p.n = 1.0;
    p.r = 1.5;
    p.eps = 0.5;
    const SteadyState s = steady_state(p);
    CHECK_FALSE(s.used_fallback);
    CHECK(s.discrepancy <= 1e-12);
    CHECK(s.v.x == steady_state_vector(p).x);
}

} // TEST_SUITE
