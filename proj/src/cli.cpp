#include "sqzsync/cli.hpp"

#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"
#include "sqzsync/io.hpp"
#include "sqzsync/limit_cycle.hpp"
#include "sqzsync/metrics.hpp"
#include "sqzsync/selftest.hpp"
#include "sqzsync/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>

namespace sqzsync::cli {

namespace {

struct RunConfig {
    std::string subcommand;
    // physical parameters
    double n = 0.0;
    double r = 0.0;
    double phi = 0.0;
    double delta = 0.0;
    double eps = 0.5;
    double gamma0_scale = 1.0; // label only
    // ensemble
    std::uint64_t seed = 42;
    std::size_t count = 200;
    double tmax = 20.0;
    double dt = 0.0; // 0 selects the default step
    double omega0 = 0.0;
    std::size_t stride = 10;
    // grids
    double eps_min = 0.0;
    double eps_max = 2.0;
    std::size_t n_eps = 200;
    double delta_min = -3.0;
    double delta_max = 3.0;
    std::size_t n_delta = 200;
    std::size_t n_phi = 256;
    std::size_t n_theta = 181;
    // output
    std::string format;
    std::string out;
    std::string config;
    std::size_t workers = 0;
};

// One flag, its config-file key and how to apply a JSON value to RunConfig.
struct Binding {
    std::string key;
    CLI::Option* option = nullptr;
    std::function<void(const json&)> apply;
};

class Parser {
public:
    explicit Parser(RunConfig& cfg) : cfg_(cfg) {}

    template <typename T>
    CLI::Option* add(CLI::App* app, const std::string& key, T& field, const std::string& help) {
        CLI::Option* opt = app->add_option("--" + key, field, help)->capture_default_str();
        bindings_[app].push_back({key, opt, [&field](const json& v) { field = v.get<T>(); }});
        return opt;
    }

    // Config-file values fill every option the user did not pass explicitly.
    void apply_config(CLI::App* app, const std::string& path) {
        std::ifstream is(path);
        if (!is) throw Error(ErrorKind::Io, "cannot read config file '" + path + "'");
        json doc;
        try {
            doc = json::parse(is);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Io, "config file '" + path + "' is not valid JSON: " + e.what());
        }
        if (!doc.is_object()) throw Error(ErrorKind::Io, "config file '" + path + "' must hold a JSON object");
        auto& list = bindings_[app];
        for (const auto& [key, value] : doc.items()) {
            if (key == "subcommand") {
                if (value.get<std::string>() != cfg_.subcommand) {
                    throw InvalidParam("config", 0.0, "config is for '" + value.get<std::string>() + "', not '" +
                                                          cfg_.subcommand + "'");
                }
                continue;
            }
            auto it = std::find_if(list.begin(), list.end(), [&](const Binding& b) { return b.key == key; });
            if (it == list.end()) throw InvalidParam(key, 0.0, "unknown key in config file '" + path + "'");
            if (it->option->count() > 0) continue;
            try {
                it->apply(value);
            } catch (const json::exception&) {
                throw InvalidParam(key, 0.0, "wrong type in config file '" + path + "'");
            }
            given_.insert(key);
        }
    }

    bool given(CLI::App* app, const std::string& key) const {
        if (given_.count(key) != 0) return true;
        const auto it = bindings_.find(app);
        if (it == bindings_.end()) return false;
        for (const auto& b : it->second) {
            if (b.key == key) return b.option->count() > 0;
        }
        return false;
    }

private:
    RunConfig& cfg_;
    std::map<CLI::App*, std::vector<Binding>> bindings_;
    std::set<std::string> given_;
};

std::string flag_for(const std::string& field) {
    static const std::map<std::string, std::string> names = {
        {"Phi", "phi"},         {"Delta", "delta"},         {"gamma0", "gamma0-scale"}, {"t_end", "tmax"},
        {"eps_min", "eps-min"}, {"eps_max", "eps-max"},     {"n_eps", "n-eps"},         {"delta_min", "delta-min"},
        {"delta_max", "delta-max"}, {"n_delta", "n-delta"}, {"n_phi", "n-phi"},         {"n_theta", "n-theta"},
    };
    const auto it = names.find(field);
    return "--" + (it == names.end() ? field : it->second);
}

SystemParams params_of(const RunConfig& c) {
    SystemParams p;
    p.n = c.n;
    p.r = c.r;
    p.Phi = c.phi;
    p.Delta = c.delta;
    p.eps = c.eps;
    return validate_params(p);
}

json base_meta(const RunConfig& c, const SystemParams& p) {
    json meta = json::object();
    meta["tool"] = "sqzsync";
    meta["version"] = kVersion;
    meta["subcommand"] = c.subcommand;
    meta["params"] = params_meta(p);
    meta["gamma0_scale"] = c.gamma0_scale;
    json derived = derived_meta(p);
    if (p.Delta == 0.0 && p.Phi == 0.0) derived["eps_opt"] = epsilon_opt_closed_form(p);
    meta["derived"] = std::move(derived);
    return meta;
}

json grid_config(const RunConfig& c, bool eps_axis, bool delta_axis, bool phi_axis) {
    json j = json::object();
    if (eps_axis) {
        j["eps_min"] = c.eps_min;
        j["eps_max"] = c.eps_max;
        j["n_eps"] = c.n_eps;
    }
    if (delta_axis) {
        j["delta_min"] = c.delta_min;
        j["delta_max"] = c.delta_max;
        j["n_delta"] = c.n_delta;
    }
    if (phi_axis) j["n_phi"] = c.n_phi;
    return j;
}

struct Outcome {
    ResultEnvelope env;
    bool numerical_flag = false;
};

void add_grid_results(Outcome& o, const SweepGrid& g) {
    const auto [iy, ix] = g.argmax();
    json res = json::object();
    res["max"] = g.max();
    res["argmax_" + g.x_axis.name] = g.x_axis.values[ix];
    res["argmax_" + g.y_axis.name] = g.y_axis.values[iy];
    res["flagged_cells"] = g.flagged.size();
    json flags = json::array();
    for (const auto& f : g.flagged) {
        json cell = json::object();
        cell[g.x_axis.name] = g.x_axis.values[f.ix];
        if (f.iy != kAllRows) cell[g.y_axis.name] = g.y_axis.values[f.iy];
        cell["discrepancy"] = f.discrepancy;
        cell["fallback"] = f.used_fallback;
        flags.push_back(std::move(cell));
    }
    res["flagged"] = std::move(flags);
    o.env.meta["results"] = std::move(res);
    o.env.data = grid_table(g);
    o.numerical_flag = !g.flagged.empty();
}

Outcome cmd_steady(const RunConfig& c) {
    const SystemParams p = params_of(c);
    const SteadyState s = steady_state(p);
    const SyncPeak peak = s_max(s.v);
    Outcome o;
    o.env.meta = base_meta(c, p);
    o.env.data.columns = {"rx", "ry", "rz", "s_max", "phi_star", "has_preference", "route", "discrepancy"};
    o.env.data.rows.push_back({s.v.x, s.v.y, s.v.z, peak.s_max, peak.phi_star,
                               static_cast<std::int64_t>(peak.has_preference ? 1 : 0),
                               std::string(s.used_fallback ? "numeric" : "analytic"), s.discrepancy});
    o.numerical_flag = !(s.discrepancy <= kFlagTolerance);
    return o;
}

Outcome cmd_cycle(const RunConfig& c) {
    const SystemParams p = params_of(c);
    EnsembleOptions opt;
    opt.t_end = c.tmax;
    opt.dt = c.dt > 0.0 ? c.dt : default_step(p);
    opt.omega0 = c.omega0;
    opt.stride = c.stride;
    if (c.stride < 1) throw InvalidParam("stride", 0.0, "must be >= 1");
    const auto states = sample_initial_states(c.count, c.seed);
    const EnsembleRun run = simulate_ensemble(p, states, opt, c.seed);

    double mean = 0.0;
    std::vector<double> radii;
    for (const auto& path : run.paths) {
        radii.push_back(std::hypot(path.samples.back().xy.x, path.samples.back().xy.y));
        mean += radii.back();
    }
    mean /= static_cast<double>(radii.size());
    double var = 0.0;
    for (double rad : radii) var += (rad - mean) * (rad - mean);

    Outcome o;
    o.env.meta = base_meta(c, p);
    json cfg = json::object();
    cfg["seed"] = c.seed;
    cfg["count"] = c.count;
    cfg["tmax"] = c.tmax;
    cfg["dt"] = opt.dt;
    cfg["omega0"] = c.omega0;
    cfg["stride"] = c.stride;
    cfg["prng"] = "mt19937_64";
    o.env.meta["config"] = std::move(cfg);
    json res = json::object();
    res["route"] = p.eps == 0.0 ? "angular" : "bloch";
    res["clamped_paths"] = run.clamped_count();
    res["final_radius_mean"] = mean;
    res["final_radius_sd"] = std::sqrt(var / static_cast<double>(radii.size()));
    o.env.meta["results"] = std::move(res);
    o.env.data = trajectory_table(run);
    return o;
}

Outcome cmd_qfunc(const RunConfig& c) {
    const SystemParams p = params_of(c);
    const SteadyState s = steady_state(p);
    const PhaseGrid g = q_grid(s.v, c.n_theta, c.n_phi);
    const auto [it, ip] = g.argmax();
    Outcome o;
    o.env.meta = base_meta(c, p);
    json cfg = json::object();
    cfg["n_theta"] = c.n_theta;
    cfg["n_phi"] = c.n_phi;
    o.env.meta["config"] = std::move(cfg);
    json res = json::object();
    res["rx"] = s.v.x;
    res["ry"] = s.v.y;
    res["rz"] = s.v.z;
    res["q_max"] = g.max();
    res["theta_peak"] = g.theta_axis[it];
    res["phi_peak"] = g.phi_axis[ip];
    res["normalization"] = g.integral();
    o.env.meta["results"] = std::move(res);
    o.env.data = q_table(g);
    o.numerical_flag = !(s.discrepancy <= kFlagTolerance);
    return o;
}

Outcome cmd_sweep_eps(const RunConfig& c) {
    const SystemParams p = params_of(c);
    Outcome o;
    o.env.meta = base_meta(c, p);
    o.env.meta["config"] = grid_config(c, true, false, true);
    add_grid_results(o, sweep_s_vs_eps(p, c.eps_min, c.eps_max, c.n_eps, c.n_phi, c.workers));
    return o;
}

Outcome cmd_sweep_delta(const RunConfig& c) {
    const SystemParams p = params_of(c);
    Outcome o;
    o.env.meta = base_meta(c, p);
    o.env.meta["config"] = grid_config(c, false, true, true);
    add_grid_results(o, sweep_s_vs_delta(p, c.delta_min, c.delta_max, c.n_delta, c.n_phi, c.workers));
    return o;
}

Outcome cmd_tongue(const RunConfig& c) {
    const SystemParams p = params_of(c);
    Outcome o;
    o.env.meta = base_meta(c, p);
    o.env.meta["config"] = grid_config(c, true, true, false);
    add_grid_results(o, arnold_tongue(p, c.eps_min, c.eps_max, c.delta_min, c.delta_max, c.n_eps, c.n_delta,
                                      c.workers));
    return o;
}

Outcome cmd_eopt(const RunConfig& c) {
    const SystemParams p = params_of(c);
    Outcome o;
    o.env.meta = base_meta(c, p);
    o.env.data.columns = {"method", "eps_opt", "s_max"};
    if (p.Delta == 0.0 && p.Phi == 0.0) {
        const EpsOpt closed = epsilon_opt(p);
        o.env.data.rows.push_back({std::string(to_string(closed.method)), closed.eps, closed.s_max});
    }
    const EpsOpt numeric = epsilon_opt_numeric(p);
    o.env.data.rows.push_back({std::string(to_string(numeric.method)), numeric.eps, numeric.s_max});
    return o;
}

Outcome cmd_selftest(const RunConfig& c, std::ostream& err) {
    const auto results = run_selftest(c.seed);
    Outcome o;
    o.env.meta["tool"] = "sqzsync";
    o.env.meta["version"] = kVersion;
    o.env.meta["subcommand"] = c.subcommand;
    json cfg = json::object();
    cfg["seed"] = c.seed;
    o.env.meta["config"] = std::move(cfg);
    o.env.data.columns = {"module", "check", "passed", "finding", "detail"};
    std::size_t failed = 0;
    for (const auto& r : results) {
        o.env.data.rows.push_back({r.module, r.name, static_cast<std::int64_t>(r.passed ? 1 : 0),
                                   static_cast<std::int64_t>(r.finding ? 1 : 0), r.detail});
        if (!r.passed) ++failed;
        err << (r.finding ? "[finding] " : (r.passed ? "[pass] " : "[FAIL] ")) << r.module << ": " << r.name << " ("
            << r.detail << ")\n";
    }
    json res = json::object();
    res["checks"] = results.size();
    res["failed"] = failed;
    o.env.meta["results"] = std::move(res);
    o.numerical_flag = failed != 0;
    return o;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    Parser parser(cfg);
    CLI::App app{"sqzsync: phase synchronization of a driven qubit in a squeezed thermal reservoir"};
    app.require_subcommand(1);

    auto physical = [&](CLI::App* sub) {
        parser.add(sub, "n", cfg.n, "mean thermal occupation n >= 0");
        parser.add(sub, "r", cfg.r, "squeezing strength r >= 0");
        parser.add(sub, "phi", cfg.phi, "squeezing angle Phi [rad]");
        parser.add(sub, "delta", cfg.delta, "detuning Delta [gamma0]");
        parser.add(sub, "eps", cfg.eps, "drive strength eps [gamma0] (default 0.5, 0 for cycle)");
        parser.add(sub, "gamma0-scale", cfg.gamma0_scale, "physical value of gamma0, recorded for labeling only");
    };
    auto output = [&](CLI::App* sub, const char* default_format) {
        sub->add_option("--out,-o", cfg.out, "output file (default: stdout)");
        sub->add_option("--format", cfg.format, std::string("csv or json (default ") + default_format + ")")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--config", cfg.config, "JSON config file; explicit flags take precedence");
    };
    auto workers = [&](CLI::App* sub) {
        sub->add_option("--workers", cfg.workers, "worker threads (0 = all cores)")->envname(kWorkersEnv);
    };
    auto eps_grid = [&](CLI::App* sub) {
        parser.add(sub, "eps-min", cfg.eps_min, "smallest drive strength");
        parser.add(sub, "eps-max", cfg.eps_max, "largest drive strength");
        parser.add(sub, "n-eps", cfg.n_eps, "drive-strength grid points");
    };
    auto delta_grid = [&](CLI::App* sub) {
        parser.add(sub, "delta-min", cfg.delta_min, "smallest detuning");
        parser.add(sub, "delta-max", cfg.delta_max, "largest detuning");
        parser.add(sub, "n-delta", cfg.n_delta, "detuning grid points");
    };

    std::map<std::string, std::string> default_format;
    auto sub = [&](const char* name, const char* help, const char* fmt) {
        CLI::App* s = app.add_subcommand(name, help);
        default_format[name] = fmt;
        output(s, fmt);
        return s;
    };

    CLI::App* steady = sub("steady", "stationary Bloch vector and synchronization peak", "json");
    physical(steady);

    CLI::App* cycle = sub("cycle", "random-ensemble trajectories in the planar projection", "csv");
    physical(cycle);
    parser.add(cycle, "seed", cfg.seed, "PRNG seed (mt19937_64)");
    parser.add(cycle, "count", cfg.count, "number of random initial states");
    parser.add(cycle, "tmax", cfg.tmax, "end time [1/gamma0]");
    parser.add(cycle, "dt", cfg.dt, "RK4 step (0 = 0.01/max(gamma,1))");
    parser.add(cycle, "omega0", cfg.omega0, "free precession frequency in the phase equation");
    parser.add(cycle, "stride", cfg.stride, "record every stride-th step");

    CLI::App* qfunc = sub("qfunc", "steady-state Husimi Q-function on a (theta, phi) grid", "csv");
    physical(qfunc);
    parser.add(qfunc, "n-theta", cfg.n_theta, "theta grid points over [0, pi]");
    parser.add(qfunc, "n-phi", cfg.n_phi, "phi grid points over [0, 2pi)");

    CLI::App* sweep_eps = sub("sweep-eps", "S(phi) versus drive strength", "csv");
    physical(sweep_eps);
    eps_grid(sweep_eps);
    parser.add(sweep_eps, "n-phi", cfg.n_phi, "phi grid points over [0, 2pi)");
    workers(sweep_eps);

    CLI::App* sweep_delta = sub("sweep-delta", "S(phi) versus detuning", "csv");
    physical(sweep_delta);
    delta_grid(sweep_delta);
    parser.add(sweep_delta, "n-phi", cfg.n_phi, "phi grid points over [0, 2pi)");
    workers(sweep_delta);

    CLI::App* tongue = sub("tongue", "S_max over the (eps, delta) plane", "csv");
    physical(tongue);
    eps_grid(tongue);
    delta_grid(tongue);
    workers(tongue);

    CLI::App* eopt = sub("eopt", "optimal drive strength", "json");
    physical(eopt);

    CLI::App* selftest = sub("selftest", "run the randomized invariant suite", "json");
    parser.add(selftest, "seed", cfg.seed, "PRNG seed for the random checks");

    // Grid defaults differ for the tongue subcommand.
    tongue->preparse_callback([&](std::size_t) {
        cfg.eps_max = 4.0;
        cfg.n_eps = 100;
        cfg.n_delta = 101;
    });
    qfunc->preparse_callback([&](std::size_t) { cfg.n_phi = 361; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitParam;
    }

    CLI::App* active = app.get_subcommands().front();
    cfg.subcommand = active->get_name();

    try {
        if (!cfg.config.empty()) parser.apply_config(active, cfg.config);
        if (active == cycle && !parser.given(active, "eps")) cfg.eps = 0.0;
        const std::string format = cfg.format.empty() ? default_format[cfg.subcommand] : cfg.format;

        Outcome o;
        if (active == steady) o = cmd_steady(cfg);
        else if (active == cycle) o = cmd_cycle(cfg);
        else if (active == qfunc) o = cmd_qfunc(cfg);
        else if (active == sweep_eps) o = cmd_sweep_eps(cfg);
        else if (active == sweep_delta) o = cmd_sweep_delta(cfg);
        else if (active == tongue) o = cmd_tongue(cfg);
        else if (active == eopt) o = cmd_eopt(cfg);
        else o = cmd_selftest(cfg, err);

        o.env.meta["format"] = format;
        const std::string text = format == "json" ? to_json(o.env) : to_csv(o.env);
        if (cfg.out.empty()) {
            out << text;
        } else {
            write_text(cfg.out, text);
        }
        if (o.numerical_flag) {
            err << "warning: numerical diagnostics flagged (see metadata)\n";
            return kExitNumerical;
        }
        return kExitOk;
    } catch (const InvalidParam& e) {
        err << "error: invalid value for " << flag_for(e.field()) << ": " << e.reason() << '\n';
        return kExitParam;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return is_numerical(e.kind()) ? kExitNumerical : kExitParam;
    }
}

} // namespace sqzsync::cli
