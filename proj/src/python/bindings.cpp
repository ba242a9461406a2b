#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "powlmine/bit_matrix.hpp"
#include "powlmine/conformance.hpp"
#include "powlmine/discovery.hpp"
#include "powlmine/error.hpp"
#include "powlmine/event_log.hpp"
#include "powlmine/interval_log.hpp"
#include "powlmine/model.hpp"
#include "powlmine/petri.hpp"
#include "powlmine/pot.hpp"
#include "powlmine/semantics.hpp"

namespace py = pybind11;
using namespace powlmine;

namespace {

std::string kind_name(Model::Kind k) {
  switch (k) {
    case Model::Kind::transition: return "transition";
    case Model::Kind::silent: return "silent";
    case Model::Kind::choice: return "xor";
    case Model::Kind::loop: return "loop";
    case Model::Kind::order: return "order";
  }
  return "?";
}

PotMultiset read_log(const std::string& path, const std::string& format, const std::string& granularity,
                     bool strict, const std::string& case_column, const std::string& activity_column,
                     const std::string& timestamp_column, std::optional<std::string> start_column,
                     std::optional<std::string> lifecycle_column, const std::string& delimiter,
                     const std::string& timestamp_format) {
  const auto g = parse_granularity(granularity);
  if (!g) throw ConfigError("unknown granularity '" + granularity + "'");
  EventLog log;
  if (format == "xes") {
    log = parse_xes_file(path, strict);
  } else if (format == "csv") {
    if (delimiter.size() != 1) throw ConfigError("delimiter must be a single character");
    CsvMapping mapping{case_column, activity_column, timestamp_column, std::move(start_column),
                       std::move(lifecycle_column), delimiter.front()};
    log = parse_csv_file(path, mapping, timestamp_format);
  } else {
    throw ConfigError("format must be 'xes' or 'csv'");
  }
  return build_pot_multiset(build_interval_log(abstract_timestamps(log, *g)));
}

// Pots from (labels, edges) pairs; repeated labels become instances 1, 2, ...
// and the edges are closed transitively.
PotMultiset from_pots(const std::vector<std::pair<std::vector<std::string>,
                                                  std::vector<std::pair<std::size_t, std::size_t>>>>& pots) {
  std::vector<Pot> out;
  for (const auto& [labels, edges] : pots) {
    Pot p;
    std::map<std::string, int> next;
    for (const auto& l : labels) p.nodes.push_back(Model::transition(l, ++next[l]));
    BitMatrix rel(labels.size());
    for (auto [u, v] : edges) {
      if (u >= labels.size() || v >= labels.size()) throw DomainError("edge endpoint out of range");
      rel.set(u, v);
    }
    rel.close_transitively();
    p.edges = rel.pairs();
    if (!p.is_strict_partial_order()) throw DomainError("pot edges must be acyclic");
    out.push_back(std::move(p));
  }
  return PotMultiset::from_pots(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "POWL discovery from partially ordered event logs";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto input = py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", input.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", input.ptr());
  py::register_exception<EmptyInputError>(m, "EmptyInputError", input.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
  py::register_exception<SizeLimitExceeded>(m, "SizeLimitExceeded", base.ptr());
  py::register_exception<StructureError>(m, "StructureError", base.ptr());

  py::class_<Model>(m, "Model")
      .def_static("transition", &Model::transition, py::arg("label"), py::arg("index") = 1)
      .def_static("silent", [] { return Model::silent(); })
      .def_static("xor", &Model::choice, py::arg("children"))
      .def_static("loop", &Model::loop, py::arg("do"), py::arg("redo"))
      .def_static("partial_order", &Model::partial_order, py::arg("children"), py::arg("edges"))
      .def_static("from_json", [](const std::string& text) { return model_from_json(text); })
      .def_property_readonly("kind", [](const Model& x) { return kind_name(x.kind()); })
      .def_property_readonly("label", &Model::label)
      .def_property_readonly("children", &Model::children)
      .def_property_readonly("edges", &Model::edges)
      .def_property_readonly("key", &Model::key)
      .def_property_readonly("leaf_count", &Model::leaf_count)
      .def("labels", [](const Model& x) { return labels(x); })
      .def("to_json", [](const Model& x) { return to_json(x); })
      .def("to_dot", [](const Model& x) { return to_dot(x); })
      .def("accepts", [](const Model& x, const Trace& t, std::size_t budget) { return accepts(x, t, budget); },
           py::arg("trace"), py::arg("budget") = kDefaultAcceptBudget)
      .def("language", [](const Model& x, std::size_t loops, std::size_t length) {
             py::set out;
             for (const auto& t : enumerate_language(x, loops, length)) out.add(py::tuple(py::cast(t)));
             return out;
           },
           py::arg("max_loop_iterations"), py::arg("max_length"))
      .def("__eq__", [](const Model& a, const Model& b) { return equivalent(a, b); })
      .def("__hash__", [](const Model& x) { return py::hash(py::str(x.key())); })
      .def("__repr__", [](const Model& x) { return describe(x); });

  py::class_<PotMultiset>(m, "PotLog")
      .def_static("from_pots", &from_pots, py::arg("pots"),
                  "Builds a log from (labels, edges) pairs; edges index into labels.")
      .def_property_readonly("case_count", &PotMultiset::total_count)
      .def_property_readonly("variant_count", [](const PotMultiset& x) { return x.variants().size(); })
      .def("variants", [](const PotMultiset& x) {
        std::vector<std::pair<std::string, std::size_t>> out;
        for (std::size_t i = 0; i < x.variants().size(); ++i)
          out.emplace_back(x.variant_key(i), x.variants()[i].count);
        return out;
      })
      .def("variant_dot", [](const PotMultiset& x, std::size_t i) {
        if (i >= x.variants().size()) throw py::index_error("no such variant");
        return export_pot_dot(x.pot(i));
      })
      .def("__len__", [](const PotMultiset& x) { return x.variants().size(); });

  m.def("read_log", &read_log, py::arg("path"), py::arg("format") = "xes", py::arg("granularity") = "none",
        py::arg("strict") = false, py::arg("case_column") = "case", py::arg("activity_column") = "activity",
        py::arg("timestamp_column") = "timestamp", py::arg("start_column") = py::none(),
        py::arg("lifecycle_column") = py::none(), py::arg("delimiter") = ",", py::arg("timestamp_format") = "",
        "Reads an XES or CSV log into partially ordered trace variants.");
  m.def("discover", &discover, py::arg("log"), py::call_guard<py::gil_scoped_release>());
  m.def("check_fitness", [](const Model& model, const PotMultiset& log, std::size_t lin_cap,
                            std::size_t accept_budget) {
          return to_json(verify_perfect_fitness(model, log, lin_cap, accept_budget));
        },
        py::arg("model"), py::arg("log"), py::arg("lin_cap") = 1000, py::arg("accept_budget") = kDefaultAcceptBudget,
        "Checks every linearization of every variant; returns the report as JSON text.");
  m.def("check_soundness", [](const Model& model, std::size_t budget) {
          const auto r = check_soundness(to_workflow_net(model), budget);
          py::dict d;
          d["verdict"] = std::string(to_string(r.verdict));
          d["explored_states"] = r.explored_states;
          d["witnesses"] = r.witnesses;
          return d;
        },
        py::arg("model"), py::arg("budget") = kDefaultSoundnessBudget);
  m.def("to_pnml", [](const Model& x) { return export_pnml(to_workflow_net(x)); }, py::arg("model"));
  m.def("to_net_dot", [](const Model& x) { return export_net_dot(to_workflow_net(x)); }, py::arg("model"));
  m.def("random_powl", &random_powl, py::arg("seed"), py::arg("max_depth"), py::arg("max_children"),
        py::arg("label_pool"));
  m.def("sample_pot_log", &sample_pot_log, py::arg("model"), py::arg("traces"), py::arg("seed"),
        py::arg("loop_geometric_p") = 0.5);
}
