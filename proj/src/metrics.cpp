#include "sqzsync/metrics.hpp"

#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"
#include "sqzsync/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sqzsync {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInvFourPi = 1.0 / (4.0 * kPi);
} // namespace

double husimi_q(const BlochVector& v, double theta, double phi) noexcept {
    const double transverse = v.x * std::cos(phi) + v.y * std::sin(phi);
    return (1.0 + transverse * std::sin(theta) + v.z * std::cos(theta)) * kInvFourPi;
}

double husimi_q_operator(const DensityMatrix& rho, double theta, double phi) {
    Eigen::Vector2cd ket;
    ket << std::cos(0.5 * theta), std::sin(0.5 * theta) * std::polar(1.0, phi);
    const cdouble amp = ket.dot(rho.matrix() * ket); // dot() conjugates the left operand
    return amp.real() / (2.0 * kPi);
}

double simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    if (n < 3) throw InvalidParam("n_theta", static_cast<double>(n), "Simpson quadrature needs >= 3 samples");

    // Even sample count: close with a 3/8 panel over the last three intervals.
    const std::size_t simpson_end = (n % 2 == 1) ? n - 1 : n - 4;
    double acc = 0.0;
    if (simpson_end > 0) {
        double odd = 0.0;
        double even = 0.0;
        for (std::size_t k = 1; k < simpson_end; ++k) {
            (k % 2 == 1 ? odd : even) += f[k];
        }
        acc = (h / 3.0) * (f[0] + 4.0 * odd + 2.0 * even + f[simpson_end]);
    }
    if (n % 2 == 0) {
        const std::size_t k = simpson_end;
        acc += (3.0 * h / 8.0) * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    }
    return acc;
}

double PhaseGrid::integral() const {
    const std::size_t nt = theta_axis.size();
    const std::size_t np = phi_axis.size();
    const double h_theta = kPi / static_cast<double>(nt - 1);
    std::vector<double> column(nt);
    double total = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t i = 0; i < nt; ++i) column[i] = std::sin(theta_axis[i]) * at(i, j);
        total += simpson(column, h_theta);
    }
    return total * kTwoPi / static_cast<double>(np);
}

std::pair<std::size_t, std::size_t> PhaseGrid::argmax() const {
    const auto it = std::max_element(values.begin(), values.end());
    const auto flat = static_cast<std::size_t>(std::distance(values.begin(), it));
    return {flat / phi_axis.size(), flat % phi_axis.size()};
}

double PhaseGrid::max() const { return *std::max_element(values.begin(), values.end()); }

PhaseGrid q_grid(const BlochVector& v, std::size_t n_theta, std::size_t n_phi) {
    if (n_theta < 3) throw InvalidParam("n_theta", static_cast<double>(n_theta), "need >= 3 theta points");
    if (n_phi < 2) throw InvalidParam("n_phi", static_cast<double>(n_phi), "need >= 2 phi points");
    PhaseGrid g;
    g.theta_axis = linspace(0.0, kPi, n_theta);
    g.phi_axis = periodic_axis(n_phi);
    g.values.reserve(n_theta * n_phi);
    for (double theta : g.theta_axis) {
        for (double phi : g.phi_axis) g.values.push_back(husimi_q(v, theta, phi));
    }
    return g;
}

double sync_measure(const BlochVector& v, double phi) noexcept {
    return (v.x * std::cos(phi) + v.y * std::sin(phi)) / 8.0;
}

double sync_measure_integral(const DensityMatrix& rho, double phi, std::size_t n_theta) {
    if (n_theta < 101) throw InvalidParam("n_theta", static_cast<double>(n_theta), "quadrature needs >= 101 points");
    const std::vector<double> theta = linspace(0.0, kPi, n_theta);
    std::vector<double> integrand(n_theta);
    for (std::size_t i = 0; i < n_theta; ++i) {
        integrand[i] = std::sin(theta[i]) * husimi_q_operator(rho, theta[i], phi);
    }
    return simpson(integrand, kPi / static_cast<double>(n_theta - 1)) - 1.0 / (2.0 * kPi);
}

SyncPeak s_max(const BlochVector& v) noexcept {
    SyncPeak peak;
    if (v.x == 0.0 && v.y == 0.0) return peak;
    peak.s_max = std::hypot(v.x, v.y) / 8.0;
    peak.phi_star = wrap_angle(std::atan2(v.y, v.x));
    peak.has_preference = true;
    return peak;
}

double SyncCurve::integral() const {
    double acc = 0.0;
    for (double s : s_values) acc += s;
    return acc * kTwoPi / static_cast<double>(s_values.size());
}

SyncCurve sync_curve(const BlochVector& v, std::size_t n_phi) {
    if (n_phi < 2) throw InvalidParam("n_phi", static_cast<double>(n_phi), "need >= 2 phi points");
    SyncCurve c;
    c.phi_axis = periodic_axis(n_phi);
    c.s_values.reserve(n_phi);
    for (double phi : c.phi_axis) c.s_values.push_back(sync_measure(v, phi));
    const auto it = std::max_element(c.s_values.begin(), c.s_values.end());
    c.s_max = *it;
    c.phi_star = c.phi_axis[static_cast<std::size_t>(std::distance(c.s_values.begin(), it))];
    return c;
}

const char* to_string(EpsOptMethod m) noexcept {
    return m == EpsOptMethod::ClosedForm ? "closed_form" : "numeric";
}

double epsilon_opt_closed_form(const SystemParams& p) {
    if (p.Delta != 0.0) throw InvalidParam("Delta", p.Delta, "closed-form optimum requires Delta = 0");
    if (p.Phi != 0.0) throw InvalidParam("Phi", p.Phi, "closed-form optimum requires Phi = 0");
    const DerivedReservoir d = derive_reservoir(p);
    return std::sqrt(d.gamma * d.gamma - 2.0 * d.gamma * p.gamma0 * std::abs(d.M)) / std::sqrt(2.0);
}

EpsOpt epsilon_opt_numeric(const SystemParams& p, double tol) {
    const double gamma = derive_reservoir(p).gamma;
    auto objective = [&](double eps) {
        SystemParams q = p;
        q.eps = eps;
        return s_max(steady_state_numeric(build_generator(q))).s_max;
    };

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double lo = 0.0;
    const double hi = 10.0 * gamma;
    double a = lo;
    double b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = objective(d);
        }
    }
    const double eps = 0.5 * (a + b);
    if (hi - b <= 2.0 * tol || a - lo <= 2.0 * tol) {
        throw Error(ErrorKind::NoMaximumFound, "S_max is monotone on the drive-strength bracket (0, 10 gamma]");
    }
    return {eps, objective(eps), EpsOptMethod::Numeric};
}

EpsOpt epsilon_opt(const SystemParams& p) {
    if (p.Delta == 0.0 && p.Phi == 0.0) {
        SystemParams q = p;
        q.eps = epsilon_opt_closed_form(p);
        return {q.eps, s_max(steady_state_vector(q)).s_max, EpsOptMethod::ClosedForm};
    }
    return epsilon_opt_numeric(p);
}

} // namespace sqzsync
