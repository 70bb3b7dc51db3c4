#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glauber/coupling.hpp"
#include "glauber/exact.hpp"
#include "glauber/experiment.hpp"
#include "glauber/lower_bound.hpp"

namespace py = pybind11;
using namespace glauber;

namespace {

// Exact chain built from the same JSON fragments the CLI accepts.
class Chain {
public:
    Chain(const std::string& graph, const std::string& system, const std::string& dynamics,
          std::size_t cap)
        : dyn_(build_dynamics(build_system(build_graph(Json::parse(graph)), Json::parse(system)),
                              Json::parse(dynamics))),
          chain_(build_exact_chain(*dyn_, cap)) {}

    std::size_t size() const { return chain_.size(); }
    std::vector<std::vector<int>> states() const {
        std::vector<std::vector<int>> out;
        for (const auto& s : chain_.states()) out.emplace_back(s.begin(), s.end());
        return out;
    }
    const std::vector<double>& stationary() const { return chain_.stationary(); }
    bool ergodic() const { return chain_.ergodic(); }

    double mixing_time(const std::string& kind) const {
        return glauber::mixing_time(chain_, kind == "continuous" ? TimeKind::continuous
                                                                 : TimeKind::discrete)
            .tau;
    }

    std::vector<std::pair<double, double>> tv_curve(const std::vector<int>& start,
                                                    const std::vector<double>& times,
                                                    const std::string& kind) const {
        Configuration s0(start.begin(), start.end());
        return glauber::tv_curve(chain_, s0, times,
                                 kind == "continuous" ? TimeKind::continuous : TimeKind::discrete)
            .samples;
    }

    double detailed_balance_violation() const {
        return check_detailed_balance(*dyn_, chain_).max_relative_violation;
    }

private:
    DynamicsPtr dyn_;
    ExactChain chain_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Glauber dynamics experiments";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

    m.def("validate", [](const std::string& text) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& d : validate(parse_config(text))) out.emplace_back(d.kind, d.detail);
        return out;
    }, py::arg("config_json"));
    m.def("compute", [](const std::string& text) {
        OutputSet o = compute_outputs(parse_config(text));
        return std::map<std::string, std::string>(o.begin(), o.end());
    }, py::arg("config_json"), "Runs an experiment in memory; returns file name -> contents.");

    m.def("hypercube_tv", &hypercube_tv, py::arg("n"), py::arg("flip_prob"), py::arg("t"));
    m.def("hypercube_crossing_time", &hypercube_crossing_time, py::arg("n"), py::arg("flip_prob"));
    m.def("cmd_occupancy_bound", &cmd_occupancy_bound, py::arg("mu"), py::arg("t"));
    m.def("poisson_path_prob", [](unsigned r, double t) {
        auto p = poisson_path_prob(r, t);
        return std::make_pair(p.p, p.bound);
    }, py::arg("r"), py::arg("t"));
    m.def("lower_bound_params", [](std::size_t n, std::size_t delta) {
        auto p = lower_bound_params(n, delta);
        py::dict d;
        d["R"] = p.R;
        d["T"] = p.T;
        d["eps"] = p.eps;
        d["target_centers"] = p.target_centers;
        return d;
    }, py::arg("n"), py::arg("delta"));
    m.attr("MIXING_THRESHOLD") = kMixingThreshold;

    py::class_<Chain>(m, "Chain")
        .def(py::init<const std::string&, const std::string&, const std::string&, std::size_t>(),
             py::arg("graph_json"), py::arg("system_json"), py::arg("dynamics_json") = "{}",
             py::arg("cap") = 200'000)
        .def("__len__", &Chain::size)
        .def_property_readonly("states", &Chain::states)
        .def_property_readonly("stationary", &Chain::stationary)
        .def_property_readonly("ergodic", &Chain::ergodic)
        .def("mixing_time", &Chain::mixing_time, py::arg("kind") = "discrete")
        .def("tv_curve", &Chain::tv_curve, py::arg("start"), py::arg("times"),
             py::arg("kind") = "discrete")
        .def("detailed_balance_violation", &Chain::detailed_balance_violation);
}
