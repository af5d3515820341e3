#include "sqzsync/types.hpp"

#include "sqzsync/error.hpp"

#include <cmath>

namespace sqzsync {

namespace pauli {
Matrix2c identity() { return Matrix2c::Identity(); }

Matrix2c x() {
    Matrix2c m;
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

Matrix2c y() {
    const cdouble i{0.0, 1.0};
    Matrix2c m;
    m << 0.0, -i,
         i, 0.0;
    return m;
}

Matrix2c z() {
    Matrix2c m;
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

Matrix2c raising() {
    Matrix2c m;
    m << 0.0, 1.0,
         0.0, 0.0;
    return m;
}

Matrix2c lowering() {
    Matrix2c m;
    m << 0.0, 0.0,
         1.0, 0.0;
    return m;
}
} // namespace pauli

double BlochVector::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

DensityMatrix::DensityMatrix(const Matrix2c& m) : m_(m) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::NotADensityMatrix, "density matrix has non-finite entries");
    }
    const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
        throw Error(ErrorKind::NotADensityMatrix, "density matrix is not Hermitian");
    }
    const cdouble tr = m.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw Error(ErrorKind::NotADensityMatrix, "density matrix trace differs from 1");
    }
    // Smallest eigenvalue of a 2x2 Hermitian matrix in closed form.
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double half_gap = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
    if (0.5 * (a + d) - half_gap < -kEigenTol) {
        throw Error(ErrorKind::NotADensityMatrix, "density matrix has a negative eigenvalue");
    }
}

double wrap_angle(double a) noexcept {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative number can round back up to exactly 2pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

SystemParams validate_params(const SystemParams& raw) {
    auto finite = [](const char* field, double v) {
        if (!std::isfinite(v)) throw InvalidParam(field, v, "must be finite");
    };
    finite("n", raw.n);
    finite("r", raw.r);
    finite("Phi", raw.Phi);
    finite("Delta", raw.Delta);
    finite("eps", raw.eps);
    finite("gamma0", raw.gamma0);
    if (raw.n < 0.0) throw InvalidParam("n", raw.n, "thermal occupation must be >= 0");
    if (raw.r < 0.0) throw InvalidParam("r", raw.r, "squeezing strength must be >= 0");
    if (raw.gamma0 <= 0.0) throw InvalidParam("gamma0", raw.gamma0, "dissipation rate must be > 0");
    // cosh(2r) overflows double beyond r ~ 355
    if (raw.r > 300.0) throw InvalidParam("r", raw.r, "squeezing strength too large to represent");

    SystemParams p = raw;
    p.Phi = wrap_angle(raw.Phi);

    const DerivedReservoir d = derive_reservoir(p);
    const double m2 = std::norm(d.M);
    const double bound = d.N * (d.N + 1.0);
    if (m2 > bound * (1.0 + 1e-12) + 1e-300) {
        throw InvalidParam("r", raw.r, "reservoir violates |M|^2 <= N(N+1)");
    }
    return p;
}

DerivedReservoir derive_reservoir(const SystemParams& p) {
    DerivedReservoir d;
    const double sh = std::sinh(p.r);
    d.N = p.n * std::cosh(2.0 * p.r) + sh * sh;
    d.M = -0.5 * std::sinh(2.0 * p.r) * std::polar(1.0, p.Phi) * (2.0 * p.n + 1.0);
    d.gamma = p.gamma0 * (2.0 * d.N + 1.0);
    return d;
}

DensityMatrix bloch_to_density(const BlochVector& v) {
    const double norm = v.norm();
    if (!(norm <= 1.0 + kBlochNormSlack)) {
        throw Error(ErrorKind::BlochNormExceeded, "Bloch vector norm exceeds 1");
    }
    const cdouble i{0.0, 1.0};
    Matrix2c m;
    m << 0.5 * (1.0 + v.z), 0.5 * (v.x - i * v.y),
         0.5 * (v.x + i * v.y), 0.5 * (1.0 - v.z);
    // Rounding in the construction stays far below the validation tolerances.
    return DensityMatrix(m);
}

BlochVector bloch_components(const Matrix2c& m) noexcept {
    // Tr(m sx) = m01 + m10, Tr(m sy) = i(m01 - m10), Tr(m sz) = m00 - m11
    const cdouble i{0.0, 1.0};
    return {(m(0, 1) + m(1, 0)).real(), (i * (m(0, 1) - m(1, 0))).real(), (m(0, 0) - m(1, 1)).real()};
}

BlochVector density_to_bloch(const DensityMatrix& rho) { return bloch_components(rho.matrix()); }

double squeeze_db(double r) {
    if (!(r >= 0.0)) throw InvalidParam("r", r, "squeezing strength must be >= 0");
    return r * 20.0 / std::log(10.0);
}

} // namespace sqzsync
