#include "causalmc/trace.h"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace cmc {

std::string tid_name(Tid t, const std::vector<std::string>& vars) {
  if (t.is_init()) {
    if (t.pos >= 0 && t.pos < static_cast<int>(vars.size()))
      return "init_" + vars[t.pos];
    return "init_" + std::to_string(t.pos);
  }
  return "p" + std::to_string(t.proc) + ".t" + std::to_string(t.pos);
}

Trace::Trace(int num_vars) : num_vars_(num_vars) {
  for (int v = 0; v < num_vars; v++) {
    TxnNode n;
    n.id = init_tid(v);
    n.writes[v] = 0;
    index_[n.id] = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(n));
  }
}

bool Trace::contains(Tid t) const { return index_.count(t) != 0; }

int Trace::index(Tid t) const {
  auto it = index_.find(t);
  if (it == index_.end())
    throw TraceError("unknown transaction " + std::to_string(t.proc) + "." +
                     std::to_string(t.pos));
  return it->second;
}

const TxnNode& Trace::node(Tid t) const { return nodes_[index(t)]; }

std::vector<Tid> Trace::transactions() const {
  std::vector<Tid> out;
  out.reserve(nodes_.size());
  for (const auto& [tid, idx] : index_) out.push_back(tid);
  return out;
}

void Trace::add_transaction(Tid t) {
  if (t.is_init()) throw TraceError("cannot add an initializer transaction");
  if (contains(t)) throw TraceError("duplicate transaction " + tid_name(t, {}));
  if (t.pos > 0) {
    Tid pred{t.proc, t.pos - 1};
    if (!contains(pred))
      throw TraceError("missing process predecessor of " + tid_name(t, {}));
    po_.emplace_back(pred, t);
  }
  TxnNode n;
  n.id = t;
  index_[t] = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  invalidate();
}

void Trace::record_write(Tid t, int var, Value v) {
  nodes_[index(t)].writes[var] = v;
  invalidate();  // writer sets feed the implicit init co edges
}

void Trace::add_rf(Tid src, Tid dst, int var) {
  const TxnNode& s = node(src);
  TxnNode& d = nodes_[index(dst)];
  if (src == dst) throw TraceError("rf source equals reader");
  if (!s.writes.count(var)) throw TraceError("rf source does not write the variable");
  auto it = d.reads.find(var);
  if (it != d.reads.end()) {
    if (it->second == src) return;  // re-read from the pinned source
    throw TraceError("reader already has an rf source for the variable");
  }
  d.reads[var] = src;
  rf_.push_back({src, dst, var});
  invalidate();
}

void Trace::add_co(Tid a, Tid b, int var) {
  if (a == b) throw TraceError("co self edge");
  if (!node(a).writes.count(var) || !node(b).writes.count(var))
    throw TraceError("co endpoints must both write the variable");
  for (const CoEdge& e : co_)
    if (e.src == a && e.dst == b && e.var == var) return;
  co_.push_back({a, b, var});
  invalidate();
}

bool Trace::has_rf(Tid src, Tid dst, int var) const {
  auto s = rf_source(dst, var);
  return s && *s == src;
}

std::optional<Tid> Trace::rf_source(Tid reader, int var) const {
  const TxnNode& n = node(reader);
  auto it = n.reads.find(var);
  if (it == n.reads.end()) return std::nullopt;
  return it->second;
}

bool Trace::writes_var(Tid t, int var) const { return node(t).writes.count(var) != 0; }

Value Trace::last_write(Tid t, int var) const {
  const TxnNode& n = node(t);
  auto it = n.writes.find(var);
  if (it == n.writes.end()) throw TraceError("transaction does not write the variable");
  return it->second;
}

std::vector<Tid> Trace::writers_of(int var) const {
  std::vector<Tid> out;
  for (const auto& [tid, idx] : index_)
    if (nodes_[idx].writes.count(var)) out.push_back(tid);
  return out;
}

void Trace::invalidate() { closures_valid_ = false; }

void Trace::ensure_closures() const {
  if (closures_valid_) return;
  int n = static_cast<int>(nodes_.size());
  porf_.assign(n, std::vector<bool>(n, false));
  hb_.assign(n, std::vector<bool>(n, false));
  auto idx = [&](Tid t) { return index_.at(t); };
  for (const auto& [a, b] : po_) {
    porf_[idx(a)][idx(b)] = true;
    hb_[idx(a)][idx(b)] = true;
  }
  for (const RfEdge& e : rf_) {
    porf_[idx(e.src)][idx(e.dst)] = true;
    hb_[idx(e.src)][idx(e.dst)] = true;
  }
  for (const CoEdge& e : co_) hb_[idx(e.src)][idx(e.dst)] = true;
  // implicit co: init_x before every other writer of x
  for (int v = 0; v < num_vars_; v++) {
    int iv = index_.at(init_tid(v));
    for (int j = 0; j < n; j++)
      if (j != iv && nodes_[j].writes.count(v)) hb_[iv][j] = true;
  }
  // Floyd-Warshall transitive closure
  for (int k = 0; k < n; k++)
    for (int i = 0; i < n; i++) {
      if (porf_[i][k])
        for (int j = 0; j < n; j++)
          if (porf_[k][j]) porf_[i][j] = true;
      if (hb_[i][k])
        for (int j = 0; j < n; j++)
          if (hb_[k][j]) hb_[i][j] = true;
    }
  closures_valid_ = true;
}

bool Trace::reach_hb(Tid a, Tid b) const {
  queries_++;
  ensure_closures();
  return hb_[index(a)][index(b)];
}

bool Trace::reach_porf(Tid a, Tid b) const {
  queries_++;
  ensure_closures();
  return porf_[index(a)][index(b)];
}

bool Trace::concurrent(Tid a, Tid b) const {
  if (a == b) return false;
  return !reach_porf(a, b) && !reach_porf(b, a);
}

bool Trace::is_acyclic() const {
  queries_++;
  ensure_closures();
  for (size_t i = 0; i < nodes_.size(); i++)
    if (hb_[i][i]) return false;
  return true;
}

bool Trace::ord_cc(Tid a, Tid b) const {
  if (a == b) return false;
  if (a.is_init()) return !b.is_init();
  if (b.is_init()) return false;
  return reach_porf(a, b);
}

WeakTrace weaken(const Trace& tr) {
  WeakTrace w;
  w.txns = tr.transactions();
  w.po = tr.po_edges();
  std::sort(w.po.begin(), w.po.end());
  for (const Trace::RfEdge& e : tr.rf_edges()) w.rf.emplace_back(e.src, e.dst, e.var);
  std::sort(w.rf.begin(), w.rf.end());
  return w;
}

std::string WeakTrace::key(const std::vector<std::string>& vars) const {
  std::ostringstream os;
  for (const Tid& t : txns) os << tid_name(t, vars) << ";";
  os << "|po:";
  for (const auto& [a, b] : po) os << tid_name(a, vars) << ">" << tid_name(b, vars) << ";";
  os << "|rf:";
  for (const auto& [a, b, v] : rf)
    os << tid_name(a, vars) << ">" << tid_name(b, vars) << ":"
       << (v < static_cast<int>(vars.size()) ? vars[v] : std::to_string(v)) << ";";
  return os.str();
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cmc
