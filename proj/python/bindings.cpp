#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "coarsegeo/constants.hpp"
#include "coarsegeo/errors.hpp"
#include "coarsegeo/group_model.hpp"
#include "coarsegeo/harness.hpp"
#include "coarsegeo/relative.hpp"

namespace py = pybind11;
using namespace coarsegeo;

namespace {

// Elements cross the boundary as normal-form strings; the model parses them back.
struct PyModel {
  GroupModel m;

  std::string normalize(const std::string& w) const { return m.format(m.parse(w)); }
  std::string multiply(const std::string& a, const std::string& b) const { return m.format(m.multiply(m.parse(a), m.parse(b))); }
  std::string inverse(const std::string& a) const { return m.format(m.inverse(m.parse(a))); }
  std::int64_t length(const std::string& a) const { return m.word_length(m.parse(a)); }
  std::int64_t distance(const std::string& a, const std::string& b) const { return m.distance(m.parse(a), m.parse(b)); }
  py::dict classify(const std::string& w) const {
    const auto c = classify_hyperbolic(m, m.parse(w));
    py::dict d;
    d["trivial"] = c.trivial;
    d["parabolic"] = c.parabolic;
    d["cyclic_syllables"] = c.cyclic_syllables;
    if (c.parabolic) {
      d["factor"] = m.factor_name(c.factor);
      d["conjugator"] = m.format(c.conjugator);
      d["core"] = m.format(c.core);
    }
    return d;
  }
};

std::string run_json(const std::string& config, const std::string& base_dir) {
  const auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(config), base_dir);
  return dump_report(run_experiment(cfg));
}

std::string constants_json(const std::string& rates, std::int64_t lambda, std::int64_t c) {
  return compute_constants(RateSet::from_json(nlohmann::json::parse(rates)), lambda, c).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_coarsegeo, mod) {
  mod.doc() = "Bindings for the coarsegeo core";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<AlphabetError>(mod, "AlphabetError", PyExc_ValueError);
  py::register_exception<PreconditionError>(mod, "PreconditionError", PyExc_ValueError);
  py::register_exception<FixtureError>(mod, "FixtureError", PyExc_RuntimeError);
  py::register_exception<ResourceError>(mod, "ResourceError", PyExc_MemoryError);

  py::class_<PyModel>(mod, "GroupModel")
      .def_static("free_group", [](int r) { return PyModel{GroupModel::free_group(r)}; }, py::arg("rank"))
      .def_static("free_abelian", [](int r) { return PyModel{GroupModel::free_abelian(r)}; }, py::arg("rank"))
      .def_static("free_product", [](const std::vector<int>& ranks) { return PyModel{GroupModel::free_product(ranks)}; },
                  py::arg("ranks"))
      .def_static("from_json", [](const std::string& s) { return PyModel{GroupModel::from_json(nlohmann::json::parse(s))}; })
      .def_property_readonly("name", [](const PyModel& p) { return p.m.name(); })
      .def_property_readonly("num_generators", [](const PyModel& p) { return p.m.num_generators(); })
      .def_property_readonly("num_factors", [](const PyModel& p) { return p.m.num_factors(); })
      .def("to_json", [](const PyModel& p) { return p.m.to_json().dump(); })
      .def("normalize", &PyModel::normalize, py::arg("word"))
      .def("multiply", &PyModel::multiply)
      .def("inverse", &PyModel::inverse)
      .def("length", &PyModel::length)
      .def("distance", &PyModel::distance)
      .def("classify", &PyModel::classify, py::arg("word"));

  mod.def("run_experiment", &run_json, py::arg("config"), py::arg("base_dir") = ".",
          "Run a JSON config and return the report as canonical JSON text.");
  mod.def("compute_constants", &constants_json, py::arg("rates"), py::arg("lam") = 1, py::arg("c") = 0);
  mod.attr("REPORT_SCHEMA_VERSION") = kReportSchemaVersion;
}
