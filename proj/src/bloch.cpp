#include "sqzsync/bloch.hpp"

#include "sqzsync/error.hpp"

#include <algorithm>
#include <cmath>

namespace sqzsync {

double AffineGenerator::norm_inf() const { return A.cwiseAbs().rowwise().sum().maxCoeff(); }

Matrix2c lindblad_rhs_density(const SystemParams& p, const DensityMatrix& state) {
    const DerivedReservoir d = derive_reservoir(p);
    const Matrix2c& rho = state.matrix();
    const Matrix2c sp = pauli::raising();
    const Matrix2c sm = pauli::lowering();
    const Matrix2c H = p.Delta * pauli::z() + p.eps * pauli::y();
    const cdouble i{0.0, 1.0};
    const double g0 = p.gamma0;

    const Matrix2c pm = sp * sm; // |1><1|
    const Matrix2c mp = sm * sp; // |0><0|

    Matrix2c drho = -0.5 * i * (H * rho - rho * H);
    drho -= g0 * d.M * (sp * rho * sp);
    drho -= g0 * std::conj(d.M) * (sm * rho * sm);
    drho -= 0.5 * g0 * (d.N + 1.0) * (pm * rho + rho * pm - 2.0 * sm * rho * sp);
    drho -= 0.5 * g0 * d.N * (mp * rho + rho * mp - 2.0 * sp * rho * sm);
    return drho;
}

AffineGenerator build_generator(const SystemParams& p) {
    AffineGenerator g;
    const BlochVector origin{};
    g.b = bloch_components(lindblad_rhs_density(p, bloch_to_density(origin))).to_eigen();
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(k) = 1.0;
        const Eigen::Vector3d image =
            bloch_components(lindblad_rhs_density(p, bloch_to_density(BlochVector::from_eigen(e)))).to_eigen();
        g.A.col(k) = image - g.b;
    }
    return g;
}

double default_step(const SystemParams& p) {
    const double gamma = derive_reservoir(p).gamma / p.gamma0;
    return 0.01 / std::max(gamma, 1.0);
}

Trajectory integrate(const AffineGenerator& g, const BlochVector& r0, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParam("dt", dt, "step must be > 0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidParam("t_end", t_end, "end time must be > 0");
    if (dt * g.norm_inf() > 1.0) {
        throw Error(ErrorKind::StepTooLarge, "dt * ||A||_inf exceeds 1; reduce the step");
    }

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt * (1.0 - 1e-12)));
    const std::size_t n = std::max<std::size_t>(steps, 1);
    const double h = t_end / static_cast<double>(n);

    Trajectory out;
    out.times.reserve(n + 1);
    out.states.reserve(n + 1);

    Eigen::Vector3d r = r0.to_eigen();
    out.times.push_back(0.0);
    out.states.push_back(r0);
    for (std::size_t k = 1; k <= n; ++k) {
        const Eigen::Vector3d k1 = g.apply(r);
        const Eigen::Vector3d k2 = g.apply(r + 0.5 * h * k1);
        const Eigen::Vector3d k3 = g.apply(r + 0.5 * h * k2);
        const Eigen::Vector3d k4 = g.apply(r + h * k3);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.times.push_back(static_cast<double>(k) * h);
        out.states.push_back(BlochVector::from_eigen(r));
    }
    return out;
}

BlochVector steady_state_numeric(const AffineGenerator& g) {
    const double scale = g.A.norm();
    const double det = g.A.determinant();
    if (!(std::abs(det) >= 1e-14 * scale * scale * scale) || scale == 0.0) {
        throw Error(ErrorKind::SingularGenerator, "generator is singular; no unique steady state");
    }
    const Eigen::Vector3d r = g.A.partialPivLu().solve(-g.b);
    return BlochVector::from_eigen(r);
}

BlochVector steady_state_analytic(const SystemParams& p) {
    const DerivedReservoir d = derive_reservoir(p);
    const double g0 = p.gamma0;
    const double gamma = d.gamma;
    const double m2 = std::norm(d.M);
    const double re_m = d.M.real();
    const double im_m = d.M.imag();
    const double delta = p.Delta;
    const double eps = p.eps;

    const double den = gamma * (4.0 * (g0 * g0 * m2 - delta * delta) - gamma * gamma)
                       + 2.0 * eps * eps * (2.0 * g0 * re_m - gamma);
    const double den_scale = gamma * (4.0 * g0 * g0 * m2 + 4.0 * delta * delta + gamma * gamma)
                             + 2.0 * eps * eps * (2.0 * g0 * std::abs(re_m) + gamma);
    if (!std::isfinite(den) || std::abs(den) <= 1e-14 * den_scale) {
        throw Error(ErrorKind::DegenerateDenominator, "closed-form steady state has a vanishing denominator");
    }

    BlochVector v;
    v.x = 2.0 * g0 * eps * (gamma - 2.0 * g0 * re_m) / den;
    v.y = 4.0 * g0 * eps * (delta + g0 * im_m) / den;
    v.z = -g0 * (4.0 * (m2 - delta * delta) - gamma * gamma) / den;
    return v;
}

SteadyState steady_state(const SystemParams& p) {
    SteadyState s;
    const BlochVector numeric = steady_state_numeric(build_generator(p));
    try {
        s.v = steady_state_analytic(p);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateDenominator) throw;
        s.v = numeric;
        s.used_fallback = true;
    }
    s.discrepancy = std::max({std::abs(s.v.x - numeric.x), std::abs(s.v.y - numeric.y), std::abs(s.v.z - numeric.z)});
    return s;
}

BlochVector steady_state_vector(const SystemParams& p) {
    try {
        return steady_state_analytic(p);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateDenominator) throw;
        return steady_state_numeric(build_generator(p));
    }
}

} // namespace sqzsync
