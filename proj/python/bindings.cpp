#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptforce/demo.hpp"
#include "ptforce/errors.hpp"
#include "ptforce/parse.hpp"
#include "ptforce/serialize.hpp"
#include "ptforce/stages.hpp"

namespace py = pybind11;
using namespace ptforce;

namespace {

std::vector<std::string> levelBits(const Tree& t, std::size_t n) {
  std::vector<std::string> out;
  for (const auto& x : level(t, n)) out.push_back(x.bits());
  return out;
}

StageConfig stagesFrom(const std::string& config) {
  return config.empty() ? defaultStageConfig() : stageConfigFromJson(Json::parse(config));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perfect-tree forcing toolkit";

  static py::exception<ForcingError> forcingError(m, "ForcingError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ForcingError& e) {
      forcingError(e.what());
    } catch (const Json::exception& e) {
      forcingError((std::string("ConfigError: ") + e.what()).c_str());
    }
  });

  py::class_<Tree>(m, "Tree")
      .def(py::init([](const std::string& expr) { return parseTree(expr); }), py::arg("expr"))
      .def("text", &Tree::text)
      .def("level", &levelBits, py::arg("n"))
      .def("contains", [](const Tree& t, const std::string& s) { return contains(t, BitString::parse(s)); })
      .def("stem", [](const Tree& t) { return stem(t).bits(); })
      .def("restrict", [](const Tree& t, const std::string& s) { return restrict(t, BitString::parse(s)); })
      .def("is_perfect", [](const Tree& t, std::size_t d) { return isPerfectToDepth(t, d).str(); },
           py::arg("depth") = 8)
      .def("__eq__", [](const Tree& a, const Tree& b) { return normalForm(a) == normalForm(b); })
      .def("__repr__", [](const Tree& t) { return "Tree('" + t.text() + "')"; });

  m.def("levels_json", [](const std::string& expr, std::size_t depth) {
    return levelsJson(parseTree(expr), depth).dump();
  }, py::arg("expr"), py::arg("depth"));

  m.def("run_stages", [](const std::string& config) {
    auto trace = runStages(stagesFrom(config));
    return py::make_tuple(traceHash(trace), traceJson(trace).dump());
  }, py::arg("config") = "", "Returns (hash, trace JSON text).");

  m.def("verify", [](const std::string& config, std::size_t depth) {
    auto trace = runStages(stagesFrom(config));
    Report all = checkStageLemmas(trace, depth);
    for (auto& c : checkPreDensity(trace, depth).checks) all.checks.push_back(std::move(c));
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& c : all.checks) out.emplace_back(c.name, statusName(c.status), c.detail);
    return out;
  }, py::arg("config") = "", py::arg("depth") = 8,
     "Lemma and pre-density checks as (name, status, detail) triples.");

  m.def("avoid_demo", [](const std::string& which) {
    AvoidDemoConfig cfg;
    if (which == "pi") cfg = canonicalDemoConfig();
    else if (which == "zero") cfg = constantDemoConfig();
    else cfg = avoidDemoConfigFromJson(Json::parse(which));
    auto res = runAvoidDemo(cfg);
    return py::make_tuple(res.ok(), res.trace.dump());
  }, py::arg("which") = "pi", "Returns (ok, trace JSON text); accepts pi, zero or a JSON config.");
}
