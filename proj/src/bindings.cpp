#include "rwre/entropy.hpp"
#include "rwre/generators.hpp"
#include "rwre/harmonic.hpp"
#include "rwre/heatkernel.hpp"
#include "rwre/models.hpp"
#include "rwre/serialize.hpp"
#include "rwre/walk.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace rwre;

namespace {

DistributionVector law_from_dict(const std::map<std::int32_t, double>& d) {
    DistributionVector mu;
    for (const auto& [v, m] : d) {
        mu.idx.push_back(v);
        mu.mass.push_back(m);
    }
    return mu;
}

std::map<std::int32_t, double> law_to_dict(const DistributionVector& mu) {
    std::map<std::int32_t, double> d;
    for (std::size_t i = 0; i < mu.idx.size(); ++i) d[mu.idx[i]] = mu.mass[i];
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "walks, entropy, and harmonic fields on random environments";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<BudgetError>(m, "BudgetError");
    py::register_exception<ParseError>(m, "ParseError");

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init<>())
        .def_readwrite("name", &ModelSpec::name)
        .def_readwrite("d", &ModelSpec::d)
        .def_readwrite("L", &ModelSpec::L)
        .def_readwrite("side", &ModelSpec::side)
        .def_readwrite("p", &ModelSpec::p)
        .def_readwrite("alpha", &ModelSpec::alpha)
        .def_readwrite("level", &ModelSpec::level)
        .def_readwrite("depth", &ModelSpec::depth)
        .def_readwrite("offspring_pmf", &ModelSpec::offspring_pmf)
        .def("deterministic", &ModelSpec::deterministic);

    py::class_<RootedEnvironment>(m, "Environment")
        .def_property_readonly("num_vertices", &RootedEnvironment::num_vertices)
        .def_property_readonly("root", [](const RootedEnvironment& e) { return e.root; })
        .def_property_readonly("model",
                               [](const RootedEnvironment& e) { return e.meta.model; })
        .def("reversible", &RootedEnvironment::reversible)
        .def("embedded", &RootedEnvironment::embedded)
        .def("horizon_budget", &RootedEnvironment::horizon_budget)
        .def("validate", &RootedEnvironment::validate)
        .def("coords_of",
             [](const RootedEnvironment& e, std::int32_t v) {
                 const auto c = e.coords_of(v);
                 return std::vector<std::int32_t>(c.begin(), c.end());
             })
        .def("hash", [](const RootedEnvironment& e) { return env_hash(e); })
        .def("dumps",
             [](const RootedEnvironment& e) {
                 std::ostringstream ss;
                 serialize(e, ss);
                 return ss.str();
             });

    m.def("make_env", &make_env, py::arg("spec"), py::arg("master_seed"),
          py::arg("replica") = 0);
    m.def("loads", [](const std::string& s) {
        std::istringstream ss(s);
        return deserialize(ss);
    });

    m.def("heat_kernel", &heat_kernel, py::arg("env"), py::arg("x"), py::arg("y"),
          py::arg("n"));
    m.def(
        "propagate",
        [](const RootedEnvironment& env, std::int32_t start, std::int64_t n) {
            return law_to_dict(propagate(env, DistributionVector::point(start), n));
        },
        py::arg("env"), py::arg("start"), py::arg("n"));
    m.def(
        "sample_path",
        [](const RootedEnvironment& env, std::int32_t start, std::int64_t n,
           std::uint64_t stream) { return sample_path(env, start, n, stream).path; },
        py::arg("env"), py::arg("start"), py::arg("n"), py::arg("stream"));

    m.def("entropy",
          [](const std::map<std::int32_t, double>& mu) { return entropy(law_from_dict(mu)); });
    m.def("delta", [](const std::map<std::int32_t, double>& mu,
                      const std::map<std::int32_t, double>& nu) {
        return delta(law_from_dict(mu), law_from_dict(nu));
    });
    m.def("delta_n", &delta_n, py::arg("env"), py::arg("x"), py::arg("y"), py::arg("n"));

    m.def(
        "displacement_profile",
        [](const ModelSpec& spec, std::int64_t n_max, std::size_t replicas,
           std::uint64_t master_seed, int threads) {
            std::vector<std::tuple<std::int64_t, double, double>> out;
            for (const auto& r : displacement_profile(spec, n_max, replicas, master_seed, threads))
                out.emplace_back(r.n, r.mean_d2, r.stderr_);
            return out;
        },
        py::arg("spec"), py::arg("n_max"), py::arg("replicas"), py::arg("master_seed"),
        py::arg("threads") = 1);

    m.def(
        "entropy_profile",
        [](const ModelSpec& spec, std::int64_t n_max, std::size_t replicas,
           std::uint64_t master_seed, int threads) {
            const auto p = entropy_profile(spec, n_max, replicas, master_seed, threads);
            std::vector<double> h;
            for (const auto& s : p.H) h.push_back(s.mean);
            return h;
        },
        py::arg("spec"), py::arg("n_max"), py::arg("replicas"), py::arg("master_seed"),
        py::arg("threads") = 1);

    m.def("poincare_constant", &poincare_constant, py::arg("env"), py::arg("x"), py::arg("n"));
    m.def(
        "corrector_profile",
        [](const RootedEnvironment& env, const std::vector<double>& v, int R, double tol) {
            const auto r = estimate_corrector(env, v, R, tol);
            return std::make_pair(r.radii, r.sup_over_r);
        },
        py::arg("env"), py::arg("v"), py::arg("R"), py::arg("tol") = 1e-10);
}
