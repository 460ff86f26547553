#include "causalmc/oracle.h"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace cmc {

namespace {

bool vc_leq(const VectorClock& a, const VectorClock& b) {
  for (size_t i = 0; i < a.size(); i++)
    if (a[i] > b[i]) return false;
  return true;
}

bool vc_lt(const VectorClock& a, const VectorClock& b) {
  return vc_leq(a, b) && a != b;
}

VectorClock vc_join(const VectorClock& a, const VectorClock& b) {
  VectorClock out(a.size());
  for (size_t i = 0; i < a.size(); i++) out[i] = std::max(a[i], b[i]);
  return out;
}

}  // namespace

Configuration initial_configuration(const Program& p, Model m) {
  Configuration c;
  c.model = m;
  if (m == Model::CCV) {
    c.ccv.resize(p.processes.size());
  } else {
    c.cc.resize(p.processes.size());
    for (auto& ls : c.cc) ls.ts.assign(p.processes.size(), 0);
    for (size_t i = 0; i < p.processes.size(); i++)
      for (int v = 0; v < static_cast<int>(p.shared_vars.size()); v++) {
        CcStoreEntry e;
        e.clock.assign(p.processes.size(), 0);
        c.cc[i].store[v].push_back(e);
      }
  }
  return c;
}

namespace {

void check_in_txn(int proc, bool in) {
  if (!in) throw OpError("process " + std::to_string(proc) + " is not in a transaction");
}

}  // namespace

/* The Configuration keeps only a flat instruction index; to execute the
 * next instruction we re-walk the body, which keeps the state a plain
 * value. Control flow is re-resolved from current registers, which is
 * sound because registers are only written by already-executed prefixes. */
namespace {

struct WalkResult {
  const Instr* ins = nullptr;
  bool done = false;
};

WalkResult walk_to(const std::vector<Instr>& body, size_t target,
                   const RegisterValuation& regs) {
  size_t count = 0;
  std::function<const Instr*(const std::vector<Instr>&)> go =
      [&](const std::vector<Instr>& block) -> const Instr* {
    for (const Instr& ins : block) {
      if (ins.kind == Instr::Kind::If) {
        if (count == target) return &ins;
        count++;
        const Instr* r =
            go(eval_expr(*ins.expr, regs) != 0 ? ins.body : ins.else_body);
        if (r) return r;
        continue;
      }
      if (count == target) return &ins;
      count++;
    }
    return nullptr;
  };
  WalkResult w;
  w.ins = go(body);
  w.done = w.ins == nullptr;
  return w;
}

Value ccv_eval(const CcvLocalState& ls, int var) {
  for (auto it = ls.log.rbegin(); it != ls.log.rend(); ++it)
    if (it->first == var) return it->second;
  auto s = ls.store.find(var);
  return s == ls.store.end() ? 0 : s->second;
}

}  // namespace

Configuration step_ccv(const Program& p, const Configuration& c, const OpLabel& l) {
  if (c.model != Model::CCV) throw OpError("configuration is not a ccv configuration");
  Configuration out = c;
  CcvLocalState& ls = out.ccv.at(l.proc);
  switch (l.kind) {
    case OpLabel::Kind::Begin: {
      if (ls.in_txn) throw OpError("begin inside a transaction");
      if (ls.next_txn >= p.processes[l.proc].transactions.size())
        throw OpError("no transaction left to begin");
      for (const auto& [v, t] : ls.ts)
        if (l.id <= t) throw OpError("transaction id below a seen timestamp");
      for (const OpMessage& m : out.msgs)
        if (m.id == l.id) throw OpError("transaction id already in use");
      ls.in_txn = true;
      ls.instr = 0;
      ls.log.clear();
      ls.next_txn++;
      out.msgs.push_back({Tid{l.proc, static_cast<int>(ls.next_txn - 1)}, l.id, {}, {}});
      return out;
    }
    case OpLabel::Kind::Exec: {
      check_in_txn(l.proc, ls.in_txn);
      const auto& body = p.processes[l.proc].transactions[ls.next_txn - 1].body;
      WalkResult w = walk_to(body, ls.instr, ls.regs);
      if (w.done) throw OpError("transaction body exhausted; expected end");
      const Instr& ins = *w.ins;
      ls.instr++;
      switch (ins.kind) {
        case Instr::Kind::RegAssign:
          ls.regs[ins.reg] = eval_expr(*ins.expr, ls.regs);
          break;
        case Instr::Kind::Assert:
        case Instr::Kind::Assume:
          if (eval_expr(*ins.expr, ls.regs) == 0)
            throw OpError(ins.kind == Instr::Kind::Assert ? "assertion failed"
                                                          : "assume failed");
          break;
        case Instr::Kind::If:
          break;  // branch resolved by the walk itself
        case Instr::Kind::SharedWrite:
          ls.log.emplace_back(p.var_index(ins.var), eval_expr(*ins.expr, ls.regs));
          break;
        case Instr::Kind::SharedRead:
          ls.regs[ins.reg] = ccv_eval(ls, p.var_index(ins.var));
          break;
        case Instr::Kind::Loop:
          throw OpError("loop in operational execution");
      }
      return out;
    }
    case OpLabel::Kind::End: {
      check_in_txn(l.proc, ls.in_txn);
      const auto& body = p.processes[l.proc].transactions[ls.next_txn - 1].body;
      if (!walk_to(body, ls.instr, ls.regs).done)
        throw OpError("end before the body is exhausted");
      ls.in_txn = false;
      // publish the log recorded at begin
      for (OpMessage& m : out.msgs)
        if (m.t == Tid{l.proc, static_cast<int>(ls.next_txn - 1)}) m.log = ls.log;
      return out;
    }
    case OpLabel::Kind::Del: {
      if (ls.in_txn) throw OpError("delivery violates transaction isolation");
      if (l.msg < 0 || l.msg >= static_cast<int>(out.msgs.size()))
        throw OpError("no such message");
      const OpMessage& m = out.msgs[l.msg];
      if (out.ccv.at(m.t.proc).in_txn && out.ccv.at(m.t.proc).next_txn - 1 ==
              static_cast<size_t>(m.t.pos))
        throw OpError("message not yet published");
      if (!out.delivered.insert({l.proc, l.msg}).second)
        throw OpError("message already delivered to this process");
      std::map<int, Value> last;
      for (const auto& [v, val] : m.log) last[v] = val;
      for (const auto& [v, val] : last) {
        uint64_t seen = ls.ts.count(v) ? ls.ts[v] : 0;
        if (seen < m.id) {
          ls.store[v] = val;
          ls.store_src[v] = m.t;
          ls.ts[v] = m.id;
        }
      }
      return out;
    }
    case OpLabel::Kind::SnapshotPick:
      throw OpError("snapshot picks only exist under cc");
  }
  throw OpError("bad label");
}

namespace {

Value cc_eval(const CcLocalState& ls, int var, bool& from_snapshot) {
  for (auto it = ls.log.rbegin(); it != ls.log.rend(); ++it)
    if (it->first == var) {
      from_snapshot = false;
      return it->second;
    }
  from_snapshot = true;
  auto s = ls.snapshot.find(var);
  if (s == ls.snapshot.end()) throw OpError("snapshot not pinned for variable");
  return s->second.value;
}

}  // namespace

Configuration step_cc(const Program& p, const Configuration& c, const OpLabel& l) {
  if (c.model != Model::CC) throw OpError("configuration is not a cc configuration");
  Configuration out = c;
  CcLocalState& ls = out.cc.at(l.proc);
  switch (l.kind) {
    case OpLabel::Kind::Begin: {
      if (ls.in_txn) throw OpError("begin inside a transaction");
      if (ls.next_txn >= p.processes[l.proc].transactions.size())
        throw OpError("no transaction left to begin");
      ls.in_txn = true;
      ls.instr = 0;
      ls.log.clear();
      ls.snapshot.clear();
      VectorClock id = ls.ts;
      id[l.proc]++;
      ls.next_txn++;
      out.msgs.push_back({Tid{l.proc, static_cast<int>(ls.next_txn - 1)}, 0, id, {}});
      return out;
    }
    case OpLabel::Kind::SnapshotPick: {
      check_in_txn(l.proc, ls.in_txn);
      auto it = ls.store.find(l.var);
      if (it == ls.store.end() || l.entry < 0 ||
          l.entry >= static_cast<int>(it->second.size()))
        throw OpError("no such store entry");
      if (ls.snapshot.count(l.var)) throw OpError("snapshot already pinned");
      ls.snapshot[l.var] = it->second[l.entry];
      return out;
    }
    case OpLabel::Kind::Exec: {
      check_in_txn(l.proc, ls.in_txn);
      const auto& body = p.processes[l.proc].transactions[ls.next_txn - 1].body;
      WalkResult w = walk_to(body, ls.instr, ls.regs);
      if (w.done) throw OpError("transaction body exhausted; expected end");
      const Instr& ins = *w.ins;
      ls.instr++;
      switch (ins.kind) {
        case Instr::Kind::RegAssign:
          ls.regs[ins.reg] = eval_expr(*ins.expr, ls.regs);
          break;
        case Instr::Kind::Assert:
        case Instr::Kind::Assume:
          if (eval_expr(*ins.expr, ls.regs) == 0)
            throw OpError(ins.kind == Instr::Kind::Assert ? "assertion failed"
                                                          : "assume failed");
          break;
        case Instr::Kind::If:
          break;
        case Instr::Kind::SharedWrite:
          ls.log.emplace_back(p.var_index(ins.var), eval_expr(*ins.expr, ls.regs));
          break;
        case Instr::Kind::SharedRead: {
          int v = p.var_index(ins.var);
          bool from_snapshot = false;
          // auto-pin when the store is unambiguous
          if (!ls.snapshot.count(v) && ls.store[v].size() == 1)
            ls.snapshot[v] = ls.store[v][0];
          ls.regs[ins.reg] = cc_eval(ls, v, from_snapshot);
          break;
        }
        case Instr::Kind::Loop:
          throw OpError("loop in operational execution");
      }
      return out;
    }
    case OpLabel::Kind::End: {
      check_in_txn(l.proc, ls.in_txn);
      const auto& body = p.processes[l.proc].transactions[ls.next_txn - 1].body;
      if (!walk_to(body, ls.instr, ls.regs).done)
        throw OpError("end before the body is exhausted");
      ls.in_txn = false;
      for (OpMessage& m : out.msgs)
        if (m.t == Tid{l.proc, static_cast<int>(ls.next_txn - 1)}) m.log = ls.log;
      return out;
    }
    case OpLabel::Kind::Del: {
      if (ls.in_txn) throw OpError("delivery violates transaction isolation");
      if (l.msg < 0 || l.msg >= static_cast<int>(out.msgs.size()))
        throw OpError("no such message");
      const OpMessage& m = out.msgs[l.msg];
      if (out.cc.at(m.t.proc).in_txn &&
          out.cc.at(m.t.proc).next_txn - 1 == static_cast<size_t>(m.t.pos))
        throw OpError("message not yet published");
      if (!out.delivered.insert({l.proc, l.msg}).second)
        throw OpError("message already delivered to this process");
      std::map<int, Value> last;
      for (const auto& [v, val] : m.log) last[v] = val;
      for (const auto& [v, val] : last) {
        auto& entries = ls.store[v];
        std::vector<CcStoreEntry> kept;
        bool dominated = false;
        for (const CcStoreEntry& e : entries) {
          if (vc_lt(e.clock, m.clock)) continue;      // replaced
          if (vc_leq(m.clock, e.clock)) dominated = true;
          kept.push_back(e);
        }
        if (!dominated) {
          CcStoreEntry e;
          e.value = val;
          e.writer = m.t;
          e.clock = m.clock;
          kept.push_back(e);
        }
        entries = std::move(kept);
      }
      ls.ts = vc_join(ls.ts, m.clock);
      return out;
    }
  }
  throw OpError("bad label");
}

/* ------------------------- axiomatic enumeration ------------------------- */

namespace {

struct AxTxnResult {
  bool assume_ok = true;
  bool need_more_choices = false;
  int pending_var = -1;  // variable of the unresolved external read
  RegisterValuation regs;
  std::vector<std::pair<int, Value>> log;
  std::vector<std::pair<int, Tid>> ext_reads;  // (var, source) resolved
};

/* Executes one transaction against a fixed list of read-source choices.
 * Re-run with one more choice whenever a fresh external read is hit. */
AxTxnResult run_txn_axiomatic(const Program& prog, const Trace& tr, Tid t,
                              const RegisterValuation& regs_in,
                              const std::vector<Tid>& choices) {
  AxTxnResult res;
  res.regs = regs_in;
  std::map<int, Value> log_last;
  std::map<int, Tid> pinned;
  size_t used = 0;
  std::function<bool(const std::vector<Instr>&)> go =
      [&](const std::vector<Instr>& block) -> bool {
    for (const Instr& ins : block) {
      switch (ins.kind) {
        case Instr::Kind::RegAssign:
          res.regs[ins.reg] = eval_expr(*ins.expr, res.regs);
          break;
        case Instr::Kind::Assume:
          if (eval_expr(*ins.expr, res.regs) == 0) {
            res.assume_ok = false;
            return false;
          }
          break;
        case Instr::Kind::Assert:
          break;  // assertions do not influence the trace set
        case Instr::Kind::If:
          if (!go(eval_expr(*ins.expr, res.regs) != 0 ? ins.body : ins.else_body))
            return false;
          break;
        case Instr::Kind::SharedWrite: {
          int v = prog.var_index(ins.var);
          Value val = eval_expr(*ins.expr, res.regs);
          log_last[v] = val;
          res.log.emplace_back(v, val);
          break;
        }
        case Instr::Kind::SharedRead: {
          int v = prog.var_index(ins.var);
          if (log_last.count(v)) {
            res.regs[ins.reg] = log_last[v];
            break;
          }
          Tid src;
          if (pinned.count(v)) {
            src = pinned[v];
          } else if (used < choices.size()) {
            src = choices[used++];
            pinned[v] = src;
            res.ext_reads.emplace_back(v, src);
          } else {
            res.need_more_choices = true;
            res.pending_var = v;
            return false;
          }
          res.regs[ins.reg] = tr.last_write(src, v);
          break;
        }
        case Instr::Kind::Loop:
          throw std::logic_error("loop in oracle execution");
      }
    }
    return true;
  };
  go(prog.processes[t.proc].transactions[t.pos].body);
  return res;
}

struct AxState {
  Trace trace;
  std::vector<size_t> next;
  std::vector<RegisterValuation> regs;
  explicit AxState(int nvars) : trace(nvars) {}
};

class AxEnumerator {
 public:
  AxEnumerator(const Program& p, Model m) : prog_(p), engine_(engine_for(m)) {}

  std::set<WeakTrace> run() {
    AxState st(static_cast<int>(prog_.shared_vars.size()));
    st.next.assign(prog_.processes.size(), 0);
    st.regs.resize(prog_.processes.size());
    recurse(st);
    return out_;
  }

 private:
  void recurse(const AxState& st) {
    bool any = false;
    for (size_t p = 0; p < prog_.processes.size(); p++) {
      if (st.next[p] >= prog_.processes[p].transactions.size()) continue;
      any = true;
      Tid t{static_cast<int>(p), static_cast<int>(st.next[p])};
      expand_txn(st, t, {});
    }
    if (!any && engine_.consistent(st.trace)) out_.insert(weaken(st.trace));
  }

  /* Grows the choice vector until the transaction completes, branching
   * over every writer of the pending variable. */
  void expand_txn(const AxState& st, Tid t, std::vector<Tid> choices) {
    AxTxnResult r = run_txn_axiomatic(prog_, st.trace, t, st.regs[t.proc], choices);
    if (!r.assume_ok) return;
    if (r.need_more_choices) {
      for (const Tid& cand : st.trace.writers_of(r.pending_var)) {
        std::vector<Tid> more = choices;
        more.push_back(cand);
        expand_txn(st, t, std::move(more));
      }
      return;
    }
    AxState next = st;
    next.next[t.proc]++;
    next.regs[t.proc] = r.regs;
    next.trace.add_transaction(t);
    for (const auto& [v, val] : r.log) next.trace.record_write(t, v, val);
    for (const auto& [v, src] : r.ext_reads) next.trace.add_rf(src, t, v);
    recurse(next);
  }

  const Program& prog_;
  const Engine& engine_;
  std::set<WeakTrace> out_;
};

}  // namespace

std::set<WeakTrace> enumerate_weak_traces(const Program& p, Model m, int guard) {
  if (p.num_transactions() > guard)
    throw OracleGuardExceeded("program exceeds the oracle guard of " +
                              std::to_string(guard) + " transactions");
  AxEnumerator e(p, m);
  return e.run();
}

/* ------------------------ operational enumeration ------------------------ */

namespace {

struct OpTxnRec {
  Tid t;
  std::map<int, Value> last_writes;
  std::set<int> cpast;  // writer indices causally before this transaction
  bool writer = false;
};

struct OpState {
  std::vector<size_t> next;
  std::vector<RegisterValuation> regs;
  std::vector<std::set<int>> delivered;  // writer txn indices per process
  std::vector<OpTxnRec> issued;
  std::vector<std::tuple<Tid, Tid, int>> rf;  // (src, reader, var)
};

class OpEnumerator {
 public:
  OpEnumerator(const Program& p, Model m) : prog_(p), model_(m) {}

  std::set<WeakTrace> run() {
    collect_txns();
    if (model_ == Model::CCV) {
      std::vector<int> perm;
      std::vector<bool> used(txns_.size(), false);
      enumerate_ranks(perm, used);
    } else {
      rank_.clear();
      start();
    }
    return out_;
  }

 private:
  void collect_txns() {
    for (size_t p = 0; p < prog_.processes.size(); p++)
      for (size_t i = 0; i < prog_.processes[p].transactions.size(); i++)
        txns_.push_back(Tid{static_cast<int>(p), static_cast<int>(i)});
  }

  /* All linear extensions of program order; the extension is the relative
   * order of CCv transaction ids. */
  void enumerate_ranks(std::vector<int>& perm, std::vector<bool>& used) {
    if (perm.size() == txns_.size()) {
      rank_.clear();
      for (size_t i = 0; i < perm.size(); i++) rank_[txns_[perm[i]]] = i;
      start();
      return;
    }
    for (size_t i = 0; i < txns_.size(); i++) {
      if (used[i]) continue;
      if (txns_[i].pos > 0) {
        // program-order predecessor must already have a smaller rank
        bool pred_done = false;
        for (size_t j = 0; j < txns_.size(); j++)
          if (used[j] && txns_[j].proc == txns_[i].proc &&
              txns_[j].pos == txns_[i].pos - 1)
            pred_done = true;
        if (!pred_done) continue;
      }
      used[i] = true;
      perm.push_back(static_cast<int>(i));
      enumerate_ranks(perm, used);
      perm.pop_back();
      used[i] = false;
    }
  }

  void start() {
    OpState st;
    st.next.assign(prog_.processes.size(), 0);
    st.regs.resize(prog_.processes.size());
    st.delivered.resize(prog_.processes.size());
    recurse(st);
  }

  void recurse(const OpState& st) {
    bool any = false;
    for (size_t p = 0; p < prog_.processes.size(); p++) {
      if (st.next[p] >= prog_.processes[p].transactions.size()) continue;
      any = true;
      // choose the messages newly delivered to p before this begin
      std::vector<int> pending;
      for (size_t i = 0; i < st.issued.size(); i++)
        if (st.issued[i].writer && !st.delivered[p].count(static_cast<int>(i)))
          pending.push_back(static_cast<int>(i));
      size_t subsets = size_t{1} << pending.size();
      for (size_t mask = 0; mask < subsets; mask++) {
        std::set<int> dset = st.delivered[p];
        bool ok = true;
        for (size_t b = 0; b < pending.size(); b++)
          if (mask & (size_t{1} << b)) dset.insert(pending[b]);
        // self delivery: the previous own transaction, if it wrote
        for (size_t i = 0; i < st.issued.size(); i++)
          if (st.issued[i].writer && st.issued[i].t.proc == static_cast<int>(p))
            dset.insert(static_cast<int>(i));
        // causal delivery: delivered sets are causally closed
        for (int d : dset)
          for (int q : st.issued[d].cpast)
            if (!dset.count(q)) ok = false;
        if (!ok) continue;
        if (model_ == Model::CCV) {
          // begin guard: the fresh id must exceed every seen timestamp
          Tid t{static_cast<int>(p), static_cast<int>(st.next[p])};
          for (int d : dset)
            if (rank_.at(st.issued[d].t) > rank_.at(t)) ok = false;
          if (!ok) continue;
        }
        issue(st, static_cast<int>(p), dset);
      }
    }
    if (!any) register_trace(st);
  }

  void issue(const OpState& st, int p, const std::set<int>& dset) {
    Tid t{p, static_cast<int>(st.next[p])};
    // resolve reads against the delivered stores, branching on CC picks
    std::vector<Tid> choices;
    expand(st, p, t, dset, choices);
  }

  struct OpTxnResult {
    bool assume_ok = true;
    bool need_choice = false;
    std::vector<Tid> candidates;
    RegisterValuation regs;
    std::map<int, Value> last_writes;
    std::vector<std::pair<int, Tid>> ext_reads;
    bool wrote = false;
  };

  OpTxnResult run_txn(const OpState& st, int p, Tid t, const std::set<int>& dset,
                      const std::vector<Tid>& choices) {
    OpTxnResult res;
    res.regs = st.regs[p];
    std::map<int, Value> log_last;
    std::map<int, Tid> pinned;
    size_t used = 0;
    std::function<bool(const std::vector<Instr>&)> go =
        [&](const std::vector<Instr>& block) -> bool {
      for (const Instr& ins : block) {
        switch (ins.kind) {
          case Instr::Kind::RegAssign:
            res.regs[ins.reg] = eval_expr(*ins.expr, res.regs);
            break;
          case Instr::Kind::Assume:
            if (eval_expr(*ins.expr, res.regs) == 0) {
              res.assume_ok = false;
              return false;
            }
            break;
          case Instr::Kind::Assert:
            break;
          case Instr::Kind::If:
            if (!go(eval_expr(*ins.expr, res.regs) != 0 ? ins.body : ins.else_body))
              return false;
            break;
          case Instr::Kind::SharedWrite: {
            int v = prog_.var_index(ins.var);
            log_last[v] = eval_expr(*ins.expr, res.regs);
            res.last_writes[v] = log_last[v];
            res.wrote = true;
            break;
          }
          case Instr::Kind::SharedRead: {
            int v = prog_.var_index(ins.var);
            if (log_last.count(v)) {
              res.regs[ins.reg] = log_last[v];
              break;
            }
            Tid src;
            if (pinned.count(v)) {
              src = pinned[v];
            } else if (model_ == Model::CCV) {
              src = ccv_store_winner(st, v, dset);
              pinned[v] = src;
              res.ext_reads.emplace_back(v, src);
            } else {
              std::vector<Tid> maxima = cc_store_entries(st, v, dset);
              if (used < choices.size()) {
                src = choices[used++];
                pinned[v] = src;
                res.ext_reads.emplace_back(v, src);
              } else {
                res.need_choice = true;
                res.candidates = maxima;
                return false;
              }
            }
            res.regs[ins.reg] =
                src.is_init() ? 0 : value_of(st, src, v);
            break;
          }
          case Instr::Kind::Loop:
            throw std::logic_error("loop in oracle execution");
        }
      }
      return true;
    };
    go(prog_.processes[p].transactions[t.pos].body);
    return res;
  }

  /* CCv: the delivered writer of v with the largest timestamp. */
  Tid ccv_store_winner(const OpState& st, int v, const std::set<int>& dset) const {
    Tid best = init_tid(v);
    bool have = false;
    uint64_t best_rank = 0;
    for (int d : dset) {
      const OpTxnRec& r = st.issued[d];
      if (!r.last_writes.count(v)) continue;
      uint64_t rk = rank_.at(r.t);
      if (!have || rk > best_rank) {
        best = r.t;
        best_rank = rk;
        have = true;
      }
    }
    return best;
  }

  /* CC: the causally maximal delivered writers of v (the store antichain). */
  std::vector<Tid> cc_store_entries(const OpState& st, int v,
                                    const std::set<int>& dset) const {
    std::vector<int> writers;
    for (int d : dset)
      if (st.issued[d].last_writes.count(v)) writers.push_back(d);
    std::vector<Tid> out;
    for (int a : writers) {
      bool dominated = false;
      for (int b : writers)
        if (b != a && st.issued[b].cpast.count(a)) dominated = true;
      if (!dominated) out.push_back(st.issued[a].t);
    }
    if (out.empty()) out.push_back(init_tid(v));
    std::sort(out.begin(), out.end());
    return out;
  }

  Value value_of(const OpState& st, Tid src, int v) const {
    for (const OpTxnRec& r : st.issued)
      if (r.t == src) return r.last_writes.at(v);
    throw std::logic_error("unknown rf source");
  }

  void expand(const OpState& st, int p, Tid t, const std::set<int>& dset,
              std::vector<Tid>& choices) {
    OpTxnResult r = run_txn(st, p, t, dset, choices);
    if (!r.assume_ok) return;
    if (r.need_choice) {
      for (const Tid& cand : r.candidates) {
        choices.push_back(cand);
        expand(st, p, t, dset, choices);
        choices.pop_back();
      }
      return;
    }
    OpState next = st;
    next.next[p]++;
    next.regs[p] = r.regs;
    next.delivered[p] = dset;
    OpTxnRec rec;
    rec.t = t;
    rec.last_writes = r.last_writes;
    rec.writer = r.wrote;
    rec.cpast = dset;
    if (t.pos > 0) {
      // own predecessor's causal past flows in even when it wrote nothing
      for (const OpTxnRec& prev : st.issued)
        if (prev.t.proc == t.proc && prev.t.pos == t.pos - 1) {
          for (int q : prev.cpast) rec.cpast.insert(q);
        }
    }
    for (int d : dset)
      for (int q : st.issued[d].cpast) rec.cpast.insert(q);
    next.issued.push_back(rec);
    for (const auto& [v, src] : r.ext_reads) next.rf.emplace_back(src, t, v);
    recurse(next);
  }

  void register_trace(const OpState& st) {
    WeakTrace w;
    for (int v = 0; v < static_cast<int>(prog_.shared_vars.size()); v++)
      w.txns.push_back(init_tid(v));
    for (const Tid& t : txns_) w.txns.push_back(t);
    std::sort(w.txns.begin(), w.txns.end());
    for (const Tid& t : txns_)
      if (t.pos > 0) w.po.emplace_back(Tid{t.proc, t.pos - 1}, t);
    std::sort(w.po.begin(), w.po.end());
    w.rf = st.rf;
    std::sort(w.rf.begin(), w.rf.end());
    out_.insert(std::move(w));
  }

  const Program& prog_;
  Model model_;
  std::vector<Tid> txns_;
  std::map<Tid, uint64_t> rank_;
  std::set<WeakTrace> out_;
};

}  // namespace

std::set<WeakTrace> enumerate_operational(const Program& p, Model m, int guard) {
  if (p.num_transactions() > guard)
    throw OracleGuardExceeded("program exceeds the operational guard of " +
                              std::to_string(guard) + " transactions");
  OpEnumerator e(p, m);
  return e.run();
}

/* ---------------------------- summaries ---------------------------------- */

std::string summary_to_string(const ExecutionSummary& s,
                              const std::vector<std::string>& vars) {
  std::ostringstream os;
  for (size_t i = 0; i < s.events.size(); i++) {
    const SummaryEvent& e = s.events[i];
    if (i) os << ".";
    os << (e.kind == SummaryEvent::Kind::Isu ? "isu(p" : "del(p") << e.proc << ","
       << tid_name(e.t, vars) << ")";
  }
  return os.str();
}

namespace {

/* The id order induced by a CC summary: a < b when a's log reaches b's
 * process before b is issued, or a precedes b in its own process. */
std::vector<std::vector<bool>> cc_summary_order(const ExecutionSummary& s,
                                                const std::vector<Tid>& txns) {
  auto pos = [&](Tid t) {
    for (size_t i = 0; i < txns.size(); i++)
      if (txns[i] == t) return static_cast<int>(i);
    return -1;
  };
  size_t n = txns.size();
  std::vector<std::vector<bool>> lt(n, std::vector<bool>(n, false));
  std::map<Tid, size_t> isu_at;
  for (size_t i = 0; i < s.events.size(); i++)
    if (s.events[i].kind == SummaryEvent::Kind::Isu) isu_at[s.events[i].t] = i;
  for (const auto& [t, i] : isu_at) {
    for (size_t j = 0; j < i; j++) {
      const SummaryEvent& e = s.events[j];
      if (e.kind == SummaryEvent::Kind::Del && e.proc == t.proc && e.t != t)
        lt[pos(e.t)][pos(t)] = true;
      if (e.kind == SummaryEvent::Kind::Isu && e.proc == t.proc && e.t != t)
        lt[pos(e.t)][pos(t)] = true;
    }
  }
  for (size_t k = 0; k < n; k++)
    for (size_t i = 0; i < n; i++)
      if (lt[i][k])
        for (size_t j = 0; j < n; j++)
          if (lt[k][j]) lt[i][j] = true;
  return lt;
}

}  // namespace

bool check_legal_summary(const ExecutionSummary& s, const Trace& tr, Model m) {
  std::vector<Tid> real;
  for (const Tid& t : tr.transactions())
    if (!t.is_init()) real.push_back(t);

  std::map<Tid, size_t> isu_at;
  std::map<Tid, std::map<int, size_t>> del_at;  // t -> proc -> position
  for (size_t i = 0; i < s.events.size(); i++) {
    const SummaryEvent& e = s.events[i];
    if (e.kind == SummaryEvent::Kind::Isu) {
      if (isu_at.count(e.t)) return false;  // one isu per transaction
      isu_at[e.t] = i;
    } else {
      auto& m2 = del_at[e.t];
      if (m2.count(e.proc)) return false;  // delivered at most once per process
      m2[e.proc] = i;
    }
  }
  for (const Tid& t : real)
    if (!isu_at.count(t)) return false;

  // condition 3: a delivery never precedes its issue
  for (const auto& [t, dels] : del_at) {
    if (!isu_at.count(t)) return false;
    for (const auto& [p, i] : dels)
      if (i < isu_at[t]) return false;
  }

  // po and (for CCv) co order the issues
  for (const auto& [a, b] : tr.po_edges())
    if (isu_at[a] > isu_at[b]) return false;
  if (m == Model::CCV)
    for (const Trace::CoEdge& e : tr.co_edges())
      if (!e.src.is_init() && isu_at[e.src] > isu_at[e.dst]) return false;

  // condition 2: store-before-issue propagates to every process
  for (const Tid& t : real) {
    if (!del_at.count(t)) continue;
    for (const auto& [p, i] : del_at[t]) {
      for (const Tid& t2 : real) {
        if (t2.proc != p || isu_at[t2] < i) continue;
        // del(p,t) < isu(p,t2): del(p',t) < del(p',t2) wherever t2 is delivered
        if (!del_at.count(t2)) continue;
        for (const auto& [p2, j2] : del_at[t2]) {
          if (!del_at[t].count(p2)) return false;
          if (del_at[t][p2] > j2) return false;
        }
      }
    }
  }

  std::vector<std::vector<bool>> cc_lt;
  std::vector<Tid> order_txns = real;
  if (m == Model::CC) cc_lt = cc_summary_order(s, order_txns);
  auto cc_pos = [&](Tid t) {
    for (size_t i = 0; i < order_txns.size(); i++)
      if (order_txns[i] == t) return static_cast<int>(i);
    return -1;
  };
  auto id_before = [&](Tid a, Tid b) {  // a.id < b.id
    if (m == Model::CCV) return s.rank.at(a) < s.rank.at(b);
    return static_cast<bool>(cc_lt[cc_pos(a)][cc_pos(b)]);
  };
  auto id_concurrent = [&](Tid a, Tid b) {
    return m == Model::CC && !cc_lt[cc_pos(a)][cc_pos(b)] &&
           !cc_lt[cc_pos(b)][cc_pos(a)];
  };

  // rf: source issued, delivered to the reader before the reader's issue,
  // applied there, and not overwritten before the read
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    size_t k = isu_at.at(e.dst);
    int p = e.dst.proc;
    size_t j = 0;
    if (!e.src.is_init()) {
      if (!del_at.count(e.src) || !del_at[e.src].count(p)) return false;
      j = del_at[e.src][p];
      if (!(isu_at.at(e.src) < j && j < k)) return false;
      if (m == Model::CCV) {
        // the source's write must have applied: nothing larger landed earlier
        for (const Tid& w : real) {
          if (w == e.src || !tr.writes_var(w, e.var)) continue;
          if (!del_at.count(w) || !del_at[w].count(p)) continue;
          if (del_at[w][p] < j && id_before(e.src, w)) return false;
        }
      }
    }
    // between delivery and issue no conflicting overwrite lands
    for (const Tid& w : real) {
      if (w == e.src || !tr.writes_var(w, e.var)) continue;
      if (!del_at.count(w) || !del_at[w].count(p)) continue;
      size_t d = del_at[w][p];
      if (!(j < d && d < k)) continue;
      if (m == Model::CCV) {
        if (e.src.is_init() || id_before(e.src, w)) return false;
      } else {
        if (e.src.is_init()) return false;
        if (!id_concurrent(e.src, w)) return false;
      }
    }
    // legality condition 1: read from the latest (ccv) / an eligible
    // concurrent (cc) delivered write
    std::vector<Tid> seen;  // delivered writers of the variable before isu
    for (const Tid& w : real) {
      if (!tr.writes_var(w, e.var)) continue;
      if (del_at.count(w) && del_at[w].count(p) && del_at[w][p] < k)
        seen.push_back(w);
    }
    if (e.src.is_init()) {
      if (m == Model::CCV && !seen.empty()) return false;
      if (m == Model::CC && !seen.empty()) return false;
    } else {
      for (const Tid& w : seen) {
        if (w == e.src) continue;
        if (m == Model::CCV && id_before(e.src, w)) return false;
        if (m == Model::CC && id_before(e.src, w) && !id_concurrent(e.src, w))
          return false;
      }
    }
  }
  return true;
}

Trace totalize_co(const Trace& tr) {
  Trace out = tr;
  for (const Trace::CoEdge& e : forced_co_edges(tr)) {
    if (e.dst.is_init()) throw TraceError("trace is not consistent");
    out.add_co(e.src, e.dst, e.var);
  }
  if (!out.is_acyclic()) throw TraceError("trace is not consistent");
  for (int v = 0; v < out.num_vars(); v++) {
    std::vector<Tid> ws = out.writers_of(v);
    for (size_t i = 0; i < ws.size(); i++)
      for (size_t j = 0; j < ws.size(); j++) {
        if (i == j || ws[i].is_init() || ws[j].is_init()) continue;
        if (!out.reach_hb(ws[i], ws[j]) && !out.reach_hb(ws[j], ws[i]))
          out.add_co(ws[i], ws[j], v);
      }
  }
  if (!out.is_acyclic()) throw TraceError("co totalization failed");
  return out;
}

ExecutionSummary summarize(const Trace& tr, Model m) {
  std::vector<Tid> real;
  int nproc = 0;
  for (const Tid& t : tr.transactions())
    if (!t.is_init()) {
      real.push_back(t);
      nproc = std::max(nproc, t.proc + 1);
    }
  if (!tr.is_acyclic()) throw TraceError("trace is not consistent");
  // issue order and id order: a topological order of happens-before,
  // extracted by repeated minima with tid tie-breaking
  std::vector<Tid> topo;
  std::vector<Tid> left = real;
  while (!left.empty()) {
    for (size_t i = 0; i < left.size(); i++) {
      bool minimal = true;
      for (size_t j = 0; j < left.size(); j++)
        if (j != i && tr.reach_hb(left[j], left[i])) minimal = false;
      if (minimal) {
        topo.push_back(left[i]);
        left.erase(left.begin() + static_cast<long>(i));
        break;
      }
    }
  }

  ExecutionSummary s;
  for (size_t i = 0; i < topo.size(); i++) s.rank[topo[i]] = i;
  std::map<int, std::set<Tid>> del_done;  // per process
  auto writer = [&](Tid t) { return !tr.node(t).writes.empty(); };
  for (const Tid& t : topo) {
    int p = t.proc;
    // deliver, in id order, every writer causally before t
    for (const Tid& w : topo) {
      if (w == t || !writer(w)) continue;
      if (del_done[p].count(w)) continue;
      if (tr.reach_porf(w, t)) {
        s.events.push_back({SummaryEvent::Kind::Del, p, w});
        del_done[p].insert(w);
      }
    }
    s.events.push_back({SummaryEvent::Kind::Isu, p, t});
    if (writer(t)) {
      s.events.push_back({SummaryEvent::Kind::Del, p, t});
      del_done[p].insert(t);
    }
  }
  // trailing deliveries so that every published log reaches every process
  for (int p = 0; p < nproc; p++) {
    for (const Tid& w : topo) {
      if (!writer(w) || del_done[p].count(w)) continue;
      s.events.push_back({SummaryEvent::Kind::Del, p, w});
      del_done[p].insert(w);
    }
  }
  if (!check_legal_summary(s, tr, m))
    throw TraceError("trace is not consistent; no legal summary exists");
  return s;
}

}  // namespace cmc
