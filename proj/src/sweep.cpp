#include "sqzsync/sweep.hpp"

#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"
#include "sqzsync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

namespace sqzsync {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw InvalidParam("n", static_cast<double>(n), "grid needs >= 2 points");
    std::vector<double> out(n);
    const double span = static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        // symmetric form keeps v[n-1-k] == -v[k] bit-exactly when lo == -hi
        out[k] = (lo * static_cast<double>(n - 1 - k) + hi * static_cast<double>(k)) / span;
    }
    return out;
}

std::vector<double> periodic_axis(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    return out;
}

double SweepGrid::max() const { return *std::max_element(values.begin(), values.end()); }

std::pair<std::size_t, std::size_t> SweepGrid::argmax() const {
    const auto it = std::max_element(values.begin(), values.end());
    const auto flat = static_cast<std::size_t>(std::distance(values.begin(), it));
    return {flat / x_axis.values.size(), flat % x_axis.values.size()};
}

std::size_t resolve_workers(std::size_t requested) noexcept {
    if (requested > 0) return requested;
    return std::max<unsigned>(std::thread::hardware_concurrency(), 1u);
}

namespace {

// Runs body(k) for k in [0, count) on up to `workers` threads with a static
// strided partition. Each k writes only its own output slots, so results do
// not depend on scheduling. The lowest-index exception is rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
    workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&](std::size_t w) {
        for (std::size_t k = w; k < count; k += workers) {
            try {
                body(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker, w);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
    const std::string msg = std::string(e.what()) + " (at " + context + ")";
    if (const auto* ip = dynamic_cast<const InvalidParam*>(&e)) {
        throw InvalidParam(ip->field(), ip->value(), ip->reason() + " (at " + context + ")");
    }
    throw Error(e.kind(), msg);
}

std::string coord(const char* a, double va, const char* b = nullptr, double vb = 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << a << '=' << va;
    if (b != nullptr) os << ", " << b << '=' << vb;
    return os.str();
}

struct CellResult {
    BlochVector v;
    std::optional<FlaggedCell> flag;
};

CellResult solve_cell(const SystemParams& q, std::size_t ix, std::size_t iy) {
    const SteadyState s = steady_state(q);
    CellResult out{s.v, std::nullopt};
    if (s.used_fallback || !(s.discrepancy <= kFlagTolerance)) {
        out.flag = FlaggedCell{ix, iy, s.discrepancy, s.used_fallback};
    }
    return out;
}

void check_range(const char* lo_name, double lo, const char* hi_name, double hi) {
    if (!std::isfinite(lo)) throw InvalidParam(lo_name, lo, "must be finite");
    if (!std::isfinite(hi)) throw InvalidParam(hi_name, hi, "must be finite");
    if (!(lo < hi)) throw InvalidParam(hi_name, hi, std::string("must exceed ") + lo_name);
}

void check_count(const char* name, std::size_t n) {
    if (n < 2) throw InvalidParam(name, static_cast<double>(n), "need >= 2 grid points");
}

void collect_flags(SweepGrid& g, std::vector<std::optional<FlaggedCell>>& flags) {
    for (auto& f : flags) {
        if (f) g.flagged.push_back(*f);
    }
}

// Shared body of the two S(phi) maps: x is the swept parameter, y is phi.
SweepGrid s_map(const SystemParams& p, const char* kind, const char* x_name, double SystemParams::*field,
                std::vector<double> xs, std::size_t n_phi, std::size_t workers) {
    SweepGrid g;
    g.kind = kind;
    g.fixed = p;
    g.x_axis = {x_name, std::move(xs)};
    g.y_axis = {"phi", periodic_axis(n_phi)};
    const std::size_t nx = g.x_axis.values.size();
    g.values.assign(n_phi * nx, 0.0);
    std::vector<std::optional<FlaggedCell>> flags(nx);

    parallel_for(nx, workers, [&](std::size_t ix) {
        SystemParams q = p;
        q.*field = g.x_axis.values[ix];
        try {
            const CellResult cell = solve_cell(q, ix, kAllRows);
            flags[ix] = cell.flag;
            for (std::size_t iy = 0; iy < n_phi; ++iy) {
                g.values[iy * nx + ix] = sync_measure(cell.v, g.y_axis.values[iy]);
            }
        } catch (const Error& e) {
            rethrow_with_context(e, coord(x_name, q.*field));
        }
    });
    collect_flags(g, flags);
    return g;
}

} // namespace

SweepGrid sweep_s_vs_eps(const SystemParams& p, double eps_min, double eps_max, std::size_t n_eps,
                         std::size_t n_phi, std::size_t workers) {
    check_range("eps_min", eps_min, "eps_max", eps_max);
    if (eps_min < 0.0) throw InvalidParam("eps_min", eps_min, "drive strength must be >= 0");
    check_count("n_eps", n_eps);
    check_count("n_phi", n_phi);
    return s_map(p, "s_vs_eps", "eps", &SystemParams::eps, linspace(eps_min, eps_max, n_eps), n_phi, workers);
}

SweepGrid sweep_s_vs_delta(const SystemParams& p, double delta_min, double delta_max, std::size_t n_delta,
                           std::size_t n_phi, std::size_t workers) {
    check_range("delta_min", delta_min, "delta_max", delta_max);
    check_count("n_delta", n_delta);
    check_count("n_phi", n_phi);
    return s_map(p, "s_vs_delta", "delta", &SystemParams::Delta, linspace(delta_min, delta_max, n_delta), n_phi,
                 workers);
}

SweepGrid arnold_tongue(const SystemParams& p, double eps_min, double eps_max, double delta_min, double delta_max,
                        std::size_t n_eps, std::size_t n_delta, std::size_t workers) {
    check_range("eps_min", eps_min, "eps_max", eps_max);
    if (eps_min < 0.0) throw InvalidParam("eps_min", eps_min, "drive strength must be >= 0");
    check_range("delta_min", delta_min, "delta_max", delta_max);
    check_count("n_eps", n_eps);
    check_count("n_delta", n_delta);

    SweepGrid g;
    g.kind = "tongue";
    g.fixed = p;
    g.x_axis = {"eps", linspace(eps_min, eps_max, n_eps)};
    g.y_axis = {"delta", linspace(delta_min, delta_max, n_delta)};
    g.values.assign(n_eps * n_delta, 0.0);
    std::vector<std::optional<FlaggedCell>> flags(n_eps * n_delta);

    parallel_for(n_eps * n_delta, workers, [&](std::size_t k) {
        const std::size_t iy = k / n_eps;
        const std::size_t ix = k % n_eps;
        SystemParams q = p;
        q.eps = g.x_axis.values[ix];
        q.Delta = g.y_axis.values[iy];
        try {
            const CellResult cell = solve_cell(q, ix, iy);
            flags[k] = cell.flag;
            g.values[k] = s_max(cell.v).s_max;
        } catch (const Error& e) {
            rethrow_with_context(e, coord("eps", q.eps, "delta", q.Delta));
        }
    });
    collect_flags(g, flags);
    return g;
}

} // namespace sqzsync
