// types.hpp: physical parameters, derived reservoir quantities and the
// two equivalent qubit state representations (Bloch vector, density matrix).
//
// All rates and times are in units of gamma0. Basis ordering is
// {|1> (excited), |0> (ground)} so that sigma_z |1> = +|1>.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace sqzsync {

using cdouble = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SystemParams {
    double n = 0.0;      // mean thermal occupation
    double r = 0.0;      // squeezing strength
    double Phi = 0.0;    // squeezing angle [rad]
    double Delta = 0.0;  // detuning omega_L - omega_0
    double eps = 0.0;    // drive strength
    double gamma0 = 1.0; // dissipation rate (unit of all rates)
};

struct DerivedReservoir {
    double N = 0.0;   // effective occupation
    cdouble M{};      // squeezing correlation
    double gamma = 1.0;
};

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const noexcept;
    Eigen::Vector3d to_eigen() const noexcept { return {x, y, z}; }
    static BlochVector from_eigen(const Eigen::Vector3d& v) noexcept { return {v(0), v(1), v(2)}; }
};

// Validated 2x2 density operator. Construction checks hermiticity, unit
// trace and positivity; the raw matrix is read-only afterwards.
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kEigenTol = 1e-9;

    // Throws Error(NotADensityMatrix) on violation.
    explicit DensityMatrix(const Matrix2c& m);

    const Matrix2c& matrix() const noexcept { return m_; }
    cdouble operator()(int i, int j) const { return m_(i, j); }

private:
    Matrix2c m_;
};

namespace pauli {
Matrix2c identity();
Matrix2c x();
Matrix2c y();
Matrix2c z();
Matrix2c raising();  // sigma_+ = |1><0|
Matrix2c lowering(); // sigma_- = |0><1|
} // namespace pauli

// Normalizes Phi to [0, 2pi) and rejects n<0, r<0, gamma0<=0 or any
// non-finite field with InvalidParam. Also asserts |M|^2 <= N(N+1).
SystemParams validate_params(const SystemParams& raw);

DerivedReservoir derive_reservoir(const SystemParams& p);

// Wraps an angle to [0, 2pi).
double wrap_angle(double a) noexcept;

// Bloch <-> operator conversions, rho = (1 + r.sigma)/2.
inline constexpr double kBlochNormSlack = 1e-9;
DensityMatrix bloch_to_density(const BlochVector& v);
BlochVector density_to_bloch(const DensityMatrix& rho);

// r_k = Re Tr(m sigma_k) for an arbitrary 2x2 matrix (no validity checks).
// Used to map operator-valued derivatives to Bloch derivatives.
BlochVector bloch_components(const Matrix2c& m) noexcept;

// Squeezing in decibels, r * 20 / ln 10.
double squeeze_db(double r);

} // namespace sqzsync
