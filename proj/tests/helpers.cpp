#include "helpers.h"

#include <functional>
#include <map>
#include <set>

namespace cmc::testutil {

Trace visibility_fixture() {
  Trace tr(4);  // x=0, y=1, v=2, z=3
  Tid t1{0, 0}, t7{0, 1};
  Tid t2{1, 0};
  Tid t3{2, 0}, t4{2, 1};
  Tid t5{3, 0}, t9{3, 1};
  Tid t6{4, 0}, t8{4, 1};
  for (Tid t : {t1, t2, t3, t5, t6, t7, t4, t9, t8}) tr.add_transaction(t);
  tr.record_write(t2, 0, 2);
  tr.record_write(t2, 1, 2);
  tr.record_write(t3, 1, 3);
  tr.record_write(t4, 1, 4);
  tr.record_write(t4, 2, 4);
  tr.record_write(t5, 1, 5);
  tr.record_write(t9, 0, 9);
  tr.record_write(t9, 1, 9);
  tr.record_write(t6, 3, 6);
  tr.record_write(t8, 1, 8);
  tr.add_rf(t2, t7, 0);  // t7 read x from t2
  tr.add_rf(t4, t7, 2);  // t7 read v from t4
  return tr;
}

namespace {

Trace pair_trace(bool consistent) {
  Trace tr(3);  // x=0, y=1, z=2
  Tid t1{0, 0}, t2{0, 1}, t3{1, 0}, t4{1, 1};
  tr.add_transaction(t1);
  tr.add_transaction(t2);
  tr.add_transaction(t3);
  tr.add_transaction(t4);
  tr.record_write(t1, 0, 1);
  tr.record_write(t1, 1, 1);
  tr.record_write(t2, 2, 1);
  tr.record_write(t3, 1, 2);
  tr.add_rf(t1, t2, 0);
  tr.add_rf(init_tid(0), t3, 0);
  tr.add_rf(t3, t4, 1);
  tr.add_rf(t2, t4, 2);
  if (consistent)
    tr.add_co(t1, t3, 1);
  else
    tr.add_co(t3, t1, 1);
  return tr;
}

}  // namespace

Trace pair_trace_consistent() { return pair_trace(true); }
Trace pair_trace_inconsistent() { return pair_trace(false); }

Program random_program(std::mt19937_64& rng, const GenOpts& opts) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  Program p;
  int nvars = 1 + pick(opts.max_vars);
  for (int v = 0; v < nvars; v++) p.shared_vars.push_back("v" + std::to_string(v));
  int nprocs = 1 + pick(opts.max_procs);
  for (int i = 0; i < nprocs; i++) {
    Process proc;
    proc.name = "p" + std::to_string(i);
    int ntxn = 1 + pick(opts.max_txns);
    for (int t = 0; t < ntxn; t++) {
      Transaction txn;
      int nins = 1 + pick(opts.max_instrs);
      for (int k = 0; k < nins; k++) {
        Instr ins;
        std::string var = p.shared_vars[pick(nvars)];
        std::string reg = "r" + std::to_string(pick(3));
        int roll = pick(100);
        if (roll < 40) {
          ins.kind = Instr::Kind::SharedWrite;
          ins.var = var;
          ins.expr = pick(4) == 0
                         ? Expr::bin(BinOp::Add, Expr::regref(reg),
                                     Expr::constant(1 + pick(3)))
                         : Expr::constant(1 + pick(3));
        } else if (roll < 75) {
          ins.kind = Instr::Kind::SharedRead;
          ins.var = var;
          ins.reg = reg;
        } else if (roll < 85 || !opts.control_flow) {
          ins.kind = Instr::Kind::RegAssign;
          ins.reg = reg;
          ins.expr = Expr::bin(BinOp::Add, Expr::regref("r" + std::to_string(pick(3))),
                               Expr::constant(pick(3)));
        } else if (roll < 95) {
          ins.kind = Instr::Kind::If;
          ins.expr = Expr::bin(BinOp::Eq, Expr::regref(reg), Expr::constant(pick(2)));
          Instr w;
          w.kind = Instr::Kind::SharedWrite;
          w.var = p.shared_vars[pick(nvars)];
          w.expr = Expr::constant(4 + pick(3));
          ins.body.push_back(w);
          if (pick(2) == 0) {
            Instr r;
            r.kind = Instr::Kind::SharedRead;
            r.var = p.shared_vars[pick(nvars)];
            r.reg = "r" + std::to_string(pick(3));
            ins.else_body.push_back(r);
          }
        } else if (roll < 98 || !opts.assumes) {
          ins.kind = Instr::Kind::Assert;
          ins.expr = Expr::bin(BinOp::Le, Expr::constant(0), Expr::regref(reg));
          ins.line = k + 1;
        } else {
          ins.kind = Instr::Kind::Assume;
          ins.expr = Expr::bin(BinOp::Ne, Expr::regref(reg), Expr::constant(2));
        }
        txn.body.push_back(std::move(ins));
      }
      proc.transactions.push_back(std::move(txn));
    }
    p.processes.push_back(std::move(proc));
  }
  return p;
}

namespace {

/* Minimal fulfilled-semantics walker used to park a random execution at a
 * pending external read. Kept independent of the explorer. */
struct Walker {
  const Program& prog;
  const Engine& engine;
  std::mt19937_64& rng;
  Trace trace;
  std::vector<size_t> next;
  std::vector<RegisterValuation> regs;

  Walker(const Program& p, Model m, std::mt19937_64& r)
      : prog(p), engine(engine_for(m)), rng(r),
        trace(static_cast<int>(p.shared_vars.size())) {
    next.assign(p.processes.size(), 0);
    regs.resize(p.processes.size());
  }

  /* Runs transactions in random order, choosing random readable sources;
   * with probability stop_p parks at a fresh external read. */
  std::optional<ReadPoint> run(double stop_p) {
    for (;;) {
      std::vector<int> avail;
      for (size_t i = 0; i < next.size(); i++)
        if (next[i] < prog.processes[i].transactions.size())
          avail.push_back(static_cast<int>(i));
      if (avail.empty()) return std::nullopt;
      int p = avail[rng() % avail.size()];
      Tid t{p, static_cast<int>(next[p])};
      next[p]++;
      trace.add_transaction(t);
      std::map<int, Value> log;
      std::map<int, Tid> pinned;
      bool parked = false;
      std::optional<ReadPoint> out;
      std::function<bool(const std::vector<Instr>&)> go =
          [&](const std::vector<Instr>& block) -> bool {
        for (const Instr& ins : block) {
          switch (ins.kind) {
            case Instr::Kind::RegAssign:
              regs[p][ins.reg] = eval_expr(*ins.expr, regs[p]);
              break;
            case Instr::Kind::Assert:
              break;
            case Instr::Kind::Assume:
              if (eval_expr(*ins.expr, regs[p]) == 0) return false;
              break;
            case Instr::Kind::If:
              if (!go(eval_expr(*ins.expr, regs[p]) != 0 ? ins.body : ins.else_body))
                return false;
              break;
            case Instr::Kind::SharedWrite: {
              int v = prog.var_index(ins.var);
              Value val = eval_expr(*ins.expr, regs[p]);
              log[v] = val;
              trace.record_write(t, v, val);
              break;
            }
            case Instr::Kind::SharedRead: {
              int v = prog.var_index(ins.var);
              if (log.count(v)) {
                regs[p][ins.reg] = log[v];
                break;
              }
              if (pinned.count(v)) {
                regs[p][ins.reg] = trace.last_write(pinned[v], v);
                break;
              }
              if (rng() % 1000 < static_cast<uint64_t>(stop_p * 1000)) {
                out.emplace(trace, t, v);
                parked = true;
                return false;
              }
              std::vector<Tid> rbl = engine.readable(trace, t, v);
              if (rbl.empty()) return false;  // cannot happen; init is readable
              Tid src = rbl[rng() % rbl.size()];
              engine.do_read(trace, t, v, src);
              pinned[v] = src;
              regs[p][ins.reg] = trace.last_write(src, v);
              break;
            }
            case Instr::Kind::Loop:
              return false;
          }
        }
        return true;
      };
      bool ok = go(prog.processes[p].transactions[t.pos].body);
      if (parked) return out;
      if (!ok) return std::nullopt;  // assume failed: discard this run
    }
  }
};

}  // namespace

std::optional<ReadPoint> random_read_point(std::mt19937_64& rng, Model m,
                                           const GenOpts& opts) {
  Program p = random_program(rng, opts);
  Walker w(p, m, rng);
  return w.run(0.35);
}

Trace random_raw_trace(std::mt19937_64& rng, int max_txns, int max_vars,
                       bool with_co) {
  int nvars = 1 + static_cast<int>(rng() % max_vars);
  Trace tr(nvars);
  int nprocs = 1 + static_cast<int>(rng() % 3);
  std::vector<int> counts(nprocs, 0);
  int total = 1 + static_cast<int>(rng() % max_txns);
  for (int i = 0; i < total; i++) {
    int p = static_cast<int>(rng() % nprocs);
    Tid t{p, counts[p]++};
    tr.add_transaction(t);
    int nw = static_cast<int>(rng() % 3);
    for (int k = 0; k < nw; k++)
      tr.record_write(t, static_cast<int>(rng() % nvars), static_cast<Value>(rng() % 5));
  }
  std::vector<Tid> txns = tr.transactions();
  // random rf edges: reader later in canonical order, source writes the var
  for (const Tid& reader : txns) {
    if (reader.is_init()) continue;
    if (rng() % 2) continue;
    int v = static_cast<int>(rng() % nvars);
    std::vector<Tid> srcs = tr.writers_of(v);
    Tid src = srcs[rng() % srcs.size()];
    if (src == reader) continue;
    if (tr.rf_source(reader, v)) continue;
    tr.add_rf(src, reader, v);
  }
  if (with_co) {
    for (int v = 0; v < nvars; v++) {
      std::vector<Tid> ws = tr.writers_of(v);
      if (ws.size() < 2) continue;
      for (size_t k = 0; k + 1 < ws.size() && k < 2; k++) {
        Tid a = ws[rng() % ws.size()], b = ws[rng() % ws.size()];
        if (a == b || a.is_init() || b.is_init()) continue;
        tr.add_co(a, b, v);
      }
    }
  }
  return tr;
}

Trace rebuild_trace(const Program& p, const WeakTrace& w) {
  Trace tr(static_cast<int>(p.shared_vars.size()));
  std::map<Tid, std::map<int, Tid>> sources;
  for (const auto& [src, dst, var] : w.rf) sources[dst][var] = src;
  // topological order of po ∪ rf over the real transactions
  std::vector<Tid> left;
  for (const Tid& t : w.txns)
    if (!t.is_init()) left.push_back(t);
  std::set<std::pair<Tid, Tid>> edges(w.po.begin(), w.po.end());
  for (const auto& [src, dst, var] : w.rf)
    if (!src.is_init()) edges.insert({src, dst});
  std::vector<RegisterValuation> regs(p.processes.size());
  while (!left.empty()) {
    size_t pick = left.size();
    for (size_t i = 0; i < left.size(); i++) {
      bool minimal = true;
      for (const Tid& o : left)
        if (o != left[i] && edges.count({o, left[i]})) {
          minimal = false;
          break;
        }
      if (minimal) {
        pick = i;
        break;
      }
    }
    if (pick >= left.size()) throw TraceError("weak trace has a po/rf cycle");
    Tid t = left[pick];
    left.erase(left.begin() + static_cast<long>(pick));
    tr.add_transaction(t);
    std::map<int, Value> log;
    std::function<void(const std::vector<Instr>&)> go =
        [&](const std::vector<Instr>& block) {
      for (const Instr& ins : block) {
        switch (ins.kind) {
          case Instr::Kind::RegAssign:
            regs[t.proc][ins.reg] = eval_expr(*ins.expr, regs[t.proc]);
            break;
          case Instr::Kind::Assert:
          case Instr::Kind::Assume:
            break;
          case Instr::Kind::If:
            go(eval_expr(*ins.expr, regs[t.proc]) != 0 ? ins.body : ins.else_body);
            break;
          case Instr::Kind::SharedWrite: {
            int v = p.var_index(ins.var);
            Value val = eval_expr(*ins.expr, regs[t.proc]);
            log[v] = val;
            tr.record_write(t, v, val);
            break;
          }
          case Instr::Kind::SharedRead: {
            int v = p.var_index(ins.var);
            if (log.count(v)) {
              regs[t.proc][ins.reg] = log[v];
              break;
            }
            Tid src = sources.at(t).at(v);
            if (!tr.has_rf(src, t, v)) tr.add_rf(src, t, v);
            regs[t.proc][ins.reg] = tr.last_write(src, v);
            break;
          }
          case Instr::Kind::Loop:
            break;
        }
      }
    };
    go(p.processes[t.proc].transactions[t.pos].body);
  }
  return tr;
}


}  // namespace cmc::testutil
