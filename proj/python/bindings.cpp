// Python bindings for the sqzsync core.

#include "sqzsync/bloch.hpp"
#include "sqzsync/error.hpp"
#include "sqzsync/limit_cycle.hpp"
#include "sqzsync/metrics.hpp"
#include "sqzsync/sweep.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sqzsync;

namespace {

py::array_t<double> grid_values(const SweepGrid& g) {
    const auto ny = static_cast<py::ssize_t>(g.y_axis.values.size());
    const auto nx = static_cast<py::ssize_t>(g.x_axis.values.size());
    py::array_t<double> out({ny, nx});
    std::copy(g.values.begin(), g.values.end(), out.mutable_data());
    return out;
}

py::dict ensemble_dict(const EnsembleRun& run) {
    std::vector<std::int64_t> id;
    std::vector<double> t, theta, phi, x, y;
    std::vector<bool> clamped;
    for (std::size_t k = 0; k < run.paths.size(); ++k) {
        for (const auto& s : run.paths[k].samples) {
            id.push_back(static_cast<std::int64_t>(k));
            t.push_back(s.t);
            theta.push_back(s.s.theta);
            phi.push_back(s.s.phi);
            x.push_back(s.xy.x);
            y.push_back(s.xy.y);
        }
        clamped.push_back(run.paths[k].clamped);
    }
    py::dict d;
    d["path_id"] = py::array(py::cast(id));
    d["t"] = py::array(py::cast(t));
    d["theta"] = py::array(py::cast(theta));
    d["phi"] = py::array(py::cast(phi));
    d["x"] = py::array(py::cast(x));
    d["y"] = py::array(py::cast(y));
    d["clamped"] = clamped;
    d["seed"] = run.seed;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Driven qubit in a squeezed thermal reservoir: steady states, limit cycles, "
              "Husimi Q-function, synchronization measure and Arnold tongues";

    static py::exception<Error> base_exc(m, "SqzSyncError", PyExc_RuntimeError);
    static py::exception<InvalidParam> param_exc(m, "InvalidParamError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidParam& e) {
            py::set_error(param_exc, e.what());
        } catch (const Error& e) {
            py::set_error(base_exc, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double n, double r, double Phi, double Delta, double eps, double gamma0) {
                 return SystemParams{n, r, Phi, Delta, eps, gamma0};
             }),
             py::arg("n") = 0.0, py::arg("r") = 0.0, py::arg("Phi") = 0.0, py::arg("Delta") = 0.0,
             py::arg("eps") = 0.0, py::arg("gamma0") = 1.0)
        .def_readwrite("n", &SystemParams::n)
        .def_readwrite("r", &SystemParams::r)
        .def_readwrite("Phi", &SystemParams::Phi)
        .def_readwrite("Delta", &SystemParams::Delta)
        .def_readwrite("eps", &SystemParams::eps)
        .def_readwrite("gamma0", &SystemParams::gamma0)
        .def("__repr__", [](const SystemParams& p) {
            return "SystemParams(n=" + std::to_string(p.n) + ", r=" + std::to_string(p.r) +
                   ", Phi=" + std::to_string(p.Phi) + ", Delta=" + std::to_string(p.Delta) +
                   ", eps=" + std::to_string(p.eps) + ", gamma0=" + std::to_string(p.gamma0) + ")";
        });

    py::class_<DerivedReservoir>(m, "DerivedReservoir")
        .def_readonly("N", &DerivedReservoir::N)
        .def_readonly("M", &DerivedReservoir::M)
        .def_readonly("gamma", &DerivedReservoir::gamma);

    py::class_<BlochVector>(m, "BlochVector")
        .def(py::init([](double x, double y, double z) { return BlochVector{x, y, z}; }),
             py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("z") = 0.0)
        .def_readwrite("x", &BlochVector::x)
        .def_readwrite("y", &BlochVector::y)
        .def_readwrite("z", &BlochVector::z)
        .def("norm", &BlochVector::norm)
        .def("to_array", &BlochVector::to_eigen)
        .def("__repr__", [](const BlochVector& v) {
            return "BlochVector(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " + std::to_string(v.z) + ")";
        });

    m.def("validate_params", &validate_params, py::arg("params"));
    m.def("derive_reservoir", &derive_reservoir, py::arg("params"));
    m.def("squeeze_db", &squeeze_db, py::arg("r"));
    m.def("bloch_to_density", [](const BlochVector& v) { return bloch_to_density(v).matrix(); }, py::arg("v"));
    m.def("density_to_bloch", [](const Matrix2c& rho) { return density_to_bloch(DensityMatrix(rho)); },
          py::arg("rho"));
    m.def("lindblad_rhs_density",
          [](const SystemParams& p, const Matrix2c& rho) { return lindblad_rhs_density(p, DensityMatrix(rho)); },
          py::arg("params"), py::arg("rho"));

    m.def("build_generator",
          [](const SystemParams& p) {
              const AffineGenerator g = build_generator(p);
              return py::make_tuple(g.A, g.b);
          },
          py::arg("params"), "Return (A, b) with dr/dt = A r + b.");
    m.def("default_step", &default_step, py::arg("params"));
    m.def("integrate",
          [](const SystemParams& p, const BlochVector& r0, double t_end, double dt) {
              const Trajectory tr = integrate(build_generator(p), r0, t_end, dt);
              py::array_t<double> states({static_cast<py::ssize_t>(tr.states.size()), py::ssize_t{3}});
              auto s = states.mutable_unchecked<2>();
              for (std::size_t k = 0; k < tr.states.size(); ++k) {
                  s(k, 0) = tr.states[k].x;
                  s(k, 1) = tr.states[k].y;
                  s(k, 2) = tr.states[k].z;
              }
              return py::make_tuple(py::array(py::cast(tr.times)), states);
          },
          py::arg("params"), py::arg("r0"), py::arg("t_end"), py::arg("dt"));
    m.def("steady_state_numeric", [](const SystemParams& p) { return steady_state_numeric(build_generator(p)); },
          py::arg("params"));
    m.def("steady_state_analytic", &steady_state_analytic, py::arg("params"));
    m.def("steady_state", &steady_state_vector, py::arg("params"));

    m.def("steady_theta", &steady_theta, py::arg("N"));
    m.def("limit_cycle_radius", &limit_cycle_radius, py::arg("theta_s"));
    m.def("angular_rhs",
          [](const SystemParams& p, double theta, double phi, double t, double omega0) {
              const AngularRate r = angular_rhs(p, {theta, phi}, t, omega0);
              return py::make_tuple(r.dtheta, r.dphi);
          },
          py::arg("params"), py::arg("theta"), py::arg("phi"), py::arg("t") = 0.0, py::arg("omega0") = 0.0);
    m.def("project_xy",
          [](double theta, double phi) {
              const PlanarPoint xy = project_xy({theta, phi});
              return py::make_tuple(xy.x, xy.y);
          },
          py::arg("theta"), py::arg("phi"));
    m.def("sample_initial_states",
          [](std::size_t count, std::uint64_t seed) {
              const auto states = sample_initial_states(count, seed);
              py::array_t<double> out({static_cast<py::ssize_t>(count), py::ssize_t{2}});
              auto a = out.mutable_unchecked<2>();
              for (std::size_t k = 0; k < count; ++k) {
                  a(k, 0) = states[k].theta;
                  a(k, 1) = states[k].phi;
              }
              return out;
          },
          py::arg("count"), py::arg("seed"));
    m.def("simulate_ensemble",
          [](const SystemParams& p, std::size_t count, std::uint64_t seed, double t_end, double dt, double omega0,
             std::size_t stride) {
              EnsembleOptions opt{t_end, dt, omega0, stride};
              return ensemble_dict(simulate_ensemble(p, sample_initial_states(count, seed), opt, seed));
          },
          py::arg("params"), py::arg("count") = 200, py::arg("seed") = 42, py::arg("t_end") = 20.0,
          py::arg("dt") = 0.01, py::arg("omega0") = 0.0, py::arg("stride") = 1);

    m.def("husimi_q", &husimi_q, py::arg("v"), py::arg("theta"), py::arg("phi"));
    m.def("husimi_q_operator",
          [](const Matrix2c& rho, double theta, double phi) { return husimi_q_operator(DensityMatrix(rho), theta, phi); },
          py::arg("rho"), py::arg("theta"), py::arg("phi"));
    m.def("q_grid",
          [](const BlochVector& v, std::size_t n_theta, std::size_t n_phi) {
              const PhaseGrid g = q_grid(v, n_theta, n_phi);
              py::array_t<double> values({static_cast<py::ssize_t>(n_theta), static_cast<py::ssize_t>(n_phi)});
              std::copy(g.values.begin(), g.values.end(), values.mutable_data());
              return py::make_tuple(py::array(py::cast(g.theta_axis)), py::array(py::cast(g.phi_axis)), values);
          },
          py::arg("v"), py::arg("n_theta") = 181, py::arg("n_phi") = 361);
    m.def("sync_measure", &sync_measure, py::arg("v"), py::arg("phi"));
    m.def("sync_measure_integral",
          [](const Matrix2c& rho, double phi, std::size_t n_theta) {
              return sync_measure_integral(DensityMatrix(rho), phi, n_theta);
          },
          py::arg("rho"), py::arg("phi"), py::arg("n_theta") = 1001);
    m.def("s_max",
          [](const BlochVector& v) {
              const SyncPeak p = s_max(v);
              return py::make_tuple(p.s_max, p.phi_star);
          },
          py::arg("v"), "Return (S_max, phi_star).");
    m.def("epsilon_opt",
          [](const SystemParams& p, bool numeric) {
              const EpsOpt e = numeric ? epsilon_opt_numeric(p) : epsilon_opt(p);
              return py::make_tuple(e.eps, e.s_max, std::string(to_string(e.method)));
          },
          py::arg("params"), py::arg("numeric") = false, "Return (eps_opt, S_max, method).");

    py::class_<SweepGrid>(m, "SweepGrid")
        .def_readonly("kind", &SweepGrid::kind)
        .def_property_readonly("x_name", [](const SweepGrid& g) { return g.x_axis.name; })
        .def_property_readonly("y_name", [](const SweepGrid& g) { return g.y_axis.name; })
        .def_property_readonly("x", [](const SweepGrid& g) { return py::array(py::cast(g.x_axis.values)); })
        .def_property_readonly("y", [](const SweepGrid& g) { return py::array(py::cast(g.y_axis.values)); })
        .def_property_readonly("values", &grid_values)
        .def_property_readonly("flagged_cells", [](const SweepGrid& g) { return g.flagged.size(); });

    m.def("sweep_s_vs_eps", &sweep_s_vs_eps, py::arg("params"), py::arg("eps_min"), py::arg("eps_max"),
          py::arg("n_eps") = 200, py::arg("n_phi") = 256, py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("sweep_s_vs_delta", &sweep_s_vs_delta, py::arg("params"), py::arg("delta_min"), py::arg("delta_max"),
          py::arg("n_delta") = 200, py::arg("n_phi") = 256, py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("arnold_tongue", &arnold_tongue, py::arg("params"), py::arg("eps_min") = 0.0, py::arg("eps_max") = 4.0,
          py::arg("delta_min") = -3.0, py::arg("delta_max") = 3.0, py::arg("n_eps") = 100, py::arg("n_delta") = 101,
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());
}
