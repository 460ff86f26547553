#include "causalmc/report.h"

#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace cmc {

using nlohmann::json;

namespace {

json tid_to_json(Tid t, const Program& p) {
  json j;
  j["name"] = tid_name(t, p.shared_vars);
  j["proc"] = t.proc;
  j["pos"] = t.pos;
  return j;
}

json weak_trace_json(const WeakTrace& w, const Program& p) {
  json j;
  j["txns"] = json::array();
  for (const Tid& t : w.txns) j["txns"].push_back(tid_to_json(t, p));
  j["po"] = json::array();
  for (const auto& [a, b] : w.po)
    j["po"].push_back({tid_name(a, p.shared_vars), tid_name(b, p.shared_vars)});
  j["rf"] = json::array();
  for (const auto& [a, b, v] : w.rf) {
    json e;
    e["from"] = tid_name(a, p.shared_vars);
    e["to"] = tid_name(b, p.shared_vars);
    e["var"] = p.shared_vars[v];
    e["from_id"] = {a.proc, a.pos};
    e["to_id"] = {b.proc, b.pos};
    e["var_id"] = v;
    j["rf"].push_back(e);
  }
  std::ostringstream h;
  h << std::hex << std::setw(16) << std::setfill('0') << weak_trace_hash(w, p);
  j["hash"] = h.str();
  return j;
}

}  // namespace

uint64_t weak_trace_hash(const WeakTrace& w, const Program& p) {
  return fnv1a64(w.key(p.shared_vars));
}

std::string report_to_json(const std::string& program_name, const Program& p,
                           const ExplorationReport& r) {
  json j;
  j["program"] = program_name;
  j["model"] = model_name(r.model);
  j["verdict"] = r.unsafe() ? "UNSAFE" : "SAFE";
  j["traces"] = r.traces.size();
  j["duplicates"] = r.duplicates;
  j["budget_exceeded"] = r.budget_exceeded;
  j["violations"] = json::array();
  for (const Violation& v : r.violations) {
    json vj;
    vj["assert_site"] = v.site;
    vj["observation_sequence"] = v.observation;
    vj["rf_edges"] = json::array();
    for (const auto& [a, b, var] : v.trace.rf)
      vj["rf_edges"].push_back(tid_name(a, p.shared_vars) + "->" +
                               tid_name(b, p.shared_vars) + ":" +
                               p.shared_vars[var]);
    j["violations"].push_back(vj);
  }
  j["stats"]["nodes"] = r.nodes;
  j["stats"]["schedules"] = r.schedules_created;
  j["stats"]["millis"] = r.millis;
  return j.dump(2) + "\n";
}

std::string weak_trace_to_json(const WeakTrace& w, const Program& p) {
  return weak_trace_json(w, p).dump(2) + "\n";
}

WeakTrace weak_trace_from_json(const std::string& text) {
  json j = json::parse(text);
  WeakTrace w;
  for (const auto& t : j.at("txns"))
    w.txns.push_back(Tid{t.at("proc").get<int>(), t.at("pos").get<int>()});
  for (const auto& e : j.at("rf")) {
    Tid a{e.at("from_id")[0].get<int>(), e.at("from_id")[1].get<int>()};
    Tid b{e.at("to_id")[0].get<int>(), e.at("to_id")[1].get<int>()};
    w.rf.emplace_back(a, b, e.at("var_id").get<int>());
  }
  // po is implied by the transaction ids
  for (const Tid& t : w.txns)
    if (!t.is_init() && t.pos > 0) w.po.emplace_back(Tid{t.proc, t.pos - 1}, t);
  std::sort(w.txns.begin(), w.txns.end());
  std::sort(w.po.begin(), w.po.end());
  std::sort(w.rf.begin(), w.rf.end());
  return w;
}

std::string weak_trace_to_dot(const WeakTrace& w, const Program& p) {
  std::ostringstream os;
  os << "digraph trace {\n";
  for (const Tid& t : w.txns)
    os << "  \"" << tid_name(t, p.shared_vars) << "\";\n";
  for (const auto& [a, b] : w.po)
    os << "  \"" << tid_name(a, p.shared_vars) << "\" -> \""
       << tid_name(b, p.shared_vars) << "\" [style=solid];\n";
  for (const auto& [a, b, v] : w.rf)
    os << "  \"" << tid_name(a, p.shared_vars) << "\" -> \""
       << tid_name(b, p.shared_vars) << "\" [style=dashed,label=\""
       << p.shared_vars[v] << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string trace_to_dot(const Trace& tr, const Program& p) {
  std::ostringstream os;
  os << "digraph trace {\n";
  for (const Tid& t : tr.transactions())
    os << "  \"" << tid_name(t, p.shared_vars) << "\";\n";
  for (const auto& [a, b] : tr.po_edges())
    os << "  \"" << tid_name(a, p.shared_vars) << "\" -> \""
       << tid_name(b, p.shared_vars) << "\" [style=solid];\n";
  for (const Trace::RfEdge& e : tr.rf_edges())
    os << "  \"" << tid_name(e.src, p.shared_vars) << "\" -> \""
       << tid_name(e.dst, p.shared_vars) << "\" [style=dashed,label=\""
       << p.shared_vars[e.var] << "\"];\n";
  for (const Trace::CoEdge& e : tr.co_edges())
    os << "  \"" << tid_name(e.src, p.shared_vars) << "\" -> \""
       << tid_name(e.dst, p.shared_vars) << "\" [style=dotted,label=\""
       << p.shared_vars[e.var] << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace cmc
