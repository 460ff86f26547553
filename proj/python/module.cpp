#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "causalmc/dpor.h"
#include "causalmc/oracle.h"
#include "causalmc/report.h"

namespace py = pybind11;
using namespace cmc;

namespace {

Model to_model(const std::string& name) { return model_from_string(name); }

py::dict trace_dict(const WeakTrace& w, const Program& p) {
  py::dict d;
  py::list txns, rf;
  for (const Tid& t : w.txns) txns.append(tid_name(t, p.shared_vars));
  for (const auto& [a, b, v] : w.rf)
    rf.append(py::make_tuple(tid_name(a, p.shared_vars), tid_name(b, p.shared_vars),
                             p.shared_vars[v]));
  d["txns"] = txns;
  d["rf"] = rf;
  d["hash"] = weak_trace_hash(w, p);
  return d;
}

py::dict report_dict(const Program& p, const ExplorationReport& r) {
  py::dict d;
  d["model"] = model_name(r.model);
  d["verdict"] = r.unsafe() ? "UNSAFE" : "SAFE";
  d["traces"] = r.traces.size();
  d["duplicates"] = r.duplicates;
  d["nodes"] = r.nodes;
  d["budget_exceeded"] = r.budget_exceeded;
  py::list violations;
  for (const Violation& v : r.violations) {
    py::dict vd;
    vd["assert_site"] = v.site;
    vd["observation_sequence"] = v.observation;
    violations.append(vd);
  }
  d["violations"] = violations;
  py::list traces;
  for (const WeakTrace& w : r.traces) traces.append(trace_dict(w, p));
  d["weak_traces"] = traces;
  return d;
}

}  // namespace

PYBIND11_MODULE(_causalmc, m) {
  m.doc() = "stateless model checking of transactional programs under causal consistency";

  py::class_<Program>(m, "Program")
      .def_property_readonly("shared_vars",
                             [](const Program& p) { return p.shared_vars; })
      .def_property_readonly("num_transactions", &Program::num_transactions)
      .def("__repr__", [](const Program& p) {
        return "<Program " + std::to_string(p.processes.size()) + " processes, " +
               std::to_string(p.num_transactions()) + " transactions>";
      });

  m.def("parse", &parse_program, py::arg("text"), py::arg("unroll_bound") = 4,
        "Parse the transactional-program DSL; loops are unrolled.");
  m.def("pretty", &print_program, py::arg("program"));

  m.def(
      "explore",
      [](const Program& p, const std::string& model,
         std::optional<uint64_t> max_traces, std::optional<uint64_t> max_nodes,
         bool stop_at_first) {
        RunConfig cfg;
        cfg.model = to_model(model);
        cfg.max_traces = max_traces;
        cfg.max_nodes = max_nodes;
        cfg.stop_at_first = stop_at_first;
        return report_dict(p, explore(p, cfg));
      },
      py::arg("program"), py::arg("model") = "ccv",
      py::arg("max_traces") = py::none(), py::arg("max_nodes") = py::none(),
      py::arg("stop_at_first") = false,
      "Explore every consistent weak trace once and report the verdict.");

  m.def(
      "enumerate_weak_traces",
      [](const Program& p, const std::string& model, int guard) {
        std::set<WeakTrace> traces = enumerate_weak_traces(p, to_model(model), guard);
        py::list out;
        for (const WeakTrace& w : traces) out.append(trace_dict(w, p));
        return out;
      },
      py::arg("program"), py::arg("model") = "ccv", py::arg("guard") = 12,
      "Exhaustive reference enumeration of the consistent weak traces.");

  m.def(
      "enumerate_operational",
      [](const Program& p, const std::string& model, int guard) {
        std::set<WeakTrace> traces = enumerate_operational(p, to_model(model), guard);
        py::list out;
        for (const WeakTrace& w : traces) out.append(trace_dict(w, p));
        return out;
      },
      py::arg("program"), py::arg("model") = "ccv", py::arg("guard") = 8,
      "Interleaving-based reference enumeration over the operational semantics.");

  m.def(
      "check",
      [](const std::string& text, const std::string& model, int unroll) {
        Program p = parse_program(text, unroll);
        RunConfig cfg;
        cfg.model = to_model(model);
        return report_dict(p, explore(p, cfg));
      },
      py::arg("text"), py::arg("model") = "ccv", py::arg("unroll") = 4,
      "Parse and explore in one step.");
}
