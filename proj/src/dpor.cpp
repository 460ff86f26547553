#include "causalmc/dpor.h"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <map>
#include <sstream>

namespace cmc {

std::string event_to_string(const Event& e, const std::vector<std::string>& vars) {
  std::string tn = tid_name(e.t, vars);
  switch (e.kind) {
    case Event::Kind::Begin: return "(begin," + tn + ")";
    case Event::Kind::End:   return "(end," + tn + ")";
    case Event::Kind::Write:
      return "(write," + tn + "," + (e.var >= 0 ? vars[e.var] : "?") + ")";
    case Event::Kind::Read:
      return "(read," + tn + "," + tid_name(e.src, vars) + "," +
             (e.var >= 0 ? vars[e.var] : "?") + ")";
  }
  return "?";
}

std::string Schedule::key(const std::vector<std::string>& vars) const {
  // two schedules that hoist the same transactions with the same read
  // sources replay to the same state, whatever their interleaving order
  std::vector<std::string> parts;
  for (const Event& e : events) {
    std::ostringstream os;
    if (e.kind == Event::Kind::Begin) os << "B" << tid_name(e.t, vars);
    if (e.kind == Event::Kind::Read)
      os << "R" << tid_name(e.t, vars) << "<" << tid_name(e.src, vars) << ":"
         << e.var;
    if (os.tellp() > 0) parts.push_back(os.str());
  }
  std::sort(parts.begin(), parts.end());
  std::ostringstream os;
  for (const std::string& p : parts) os << p << ";";
  return os.str();
}

bool schedule_is_novel(const std::vector<Schedule>& existing, const Schedule& candidate) {
  std::vector<std::string> no_vars;
  std::string k = candidate.key(no_vars);
  for (const Schedule& s : existing)
    if (s.key(no_vars) == k) return false;
  return true;
}

namespace {

struct BudgetExceeded {};
struct StopExploration {};

struct InstrFrame {
  const std::vector<Instr>* block;
  size_t idx;
};

struct ProcRT {
  size_t next_txn = 0;
  RegisterValuation regs;
};

struct TxnRT {
  Tid t;
  std::vector<InstrFrame> stack;
  std::map<int, Value> log;          // last own write per variable
  std::map<int, Tid> currentreads;   // pinned external sources per variable
};

struct ExState {
  Trace trace;
  std::vector<ProcRT> procs;
  std::optional<TxnRT> active;
  ObservationSequence pi;
  std::set<int> frozen;  // processes stuck on a failed assume
  std::set<Tid> dead;    // their unfinished transactions: never readable

  explicit ExState(int nvars) : trace(nvars) {}
};

struct ReadFrame {
  std::vector<Schedule> schedules;
};

enum class StepKind { Done, FreshRead, AssumeFailed };

struct StepResult {
  StepKind kind = StepKind::Done;
  int var = -1;           // FreshRead
  std::string dest_reg;   // FreshRead
};

class Explorer {
 public:
  Explorer(const Program& p, const RunConfig& cfg)
      : prog_(p), cfg_(cfg), engine_(engine_for(cfg.model)) {}

  ExplorationReport run() {
    report_ = ExplorationReport{};
    report_.model = cfg_.model;
    auto t0 = std::chrono::steady_clock::now();
    ExState init(static_cast<int>(prog_.shared_vars.size()));
    init.procs.resize(prog_.processes.size());
    try {
      explore(std::move(init));
    } catch (const BudgetExceeded&) {
      report_.budget_exceeded = true;
    } catch (const StopExploration&) {
    }
    auto t1 = std::chrono::steady_clock::now();
    report_.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return report_;
  }

 private:
  /* At a transaction boundary: begin the next transaction of the lowest
   * available process, or register the completed weak trace. */
  void explore(ExState st) {
    assert(!st.active);
    int p = -1;
    for (size_t i = 0; i < st.procs.size(); i++) {
      if (st.frozen.count(static_cast<int>(i))) continue;
      if (st.procs[i].next_txn < prog_.processes[i].transactions.size()) {
        p = static_cast<int>(i);
        break;
      }
    }
    if (p < 0) {
      // a frozen process means the execution is discarded, but the branch
      // was still explored so its writers could pair schedules
      if (st.frozen.empty()) register_trace(st);
      return;
    }
    ExState pre = st;  // resume point for schedules of reads in this transaction
    begin_txn(st, p);
    run_txn(std::move(st), pre);
  }

  void begin_txn(ExState& st, int p) {
    Tid t{p, static_cast<int>(st.procs[p].next_txn)};
    st.procs[p].next_txn++;
    st.trace.add_transaction(t);
    TxnRT rt;
    rt.t = t;
    rt.stack.push_back({&prog_.processes[p].transactions[t.pos].body, 0});
    st.active = std::move(rt);
    Event e;
    e.kind = Event::Kind::Begin;
    e.t = t;
    append(st, e);
  }

  void run_txn(ExState st, const ExState& pre) {
    for (;;) {
      StepResult r = step(st);
      if (r.kind == StepKind::AssumeFailed) {
        freeze_active(st);
        explore(std::move(st));
        return;
      }
      if (r.kind == StepKind::Done) {
        Tid t = st.pi.back().t;
        explore(st);
        create_schedules(st, t);
        return;
      }
      // fresh external read: one recursive branch per readable source
      Tid t = st.active->t;
      uint64_t fid = next_frame_id_++;
      ReadFrame frame;
      frames_[fid] = &frame;
      std::vector<Tid> sources = engine_.readable(st.trace, t, r.var);
      std::erase_if(sources, [&](const Tid& s) { return st.dead.count(s); });
      for (const Tid& src : sources) {
        ExState st2 = st;
        do_read(st2, r.var, r.dest_reg, src, /*swappable=*/true, fid);
        run_txn(std::move(st2), pre);
      }
      size_t next = 0;
      while (next < frame.schedules.size()) {
        Schedule beta = frame.schedules[next++];
        run_schedule(pre, beta);
      }
      frames_.erase(fid);
      return;
    }
  }

  /* Executes instructions of the active transaction until it ends, blocks
   * on a fresh external read, or dies on a failed assume. */
  StepResult step(ExState& st) {
    TxnRT& rt = *st.active;
    ProcRT& proc = st.procs[rt.t.proc];
    while (!rt.stack.empty()) {
      InstrFrame& top = rt.stack.back();
      if (top.idx >= top.block->size()) {
        rt.stack.pop_back();
        continue;
      }
      const Instr& ins = (*top.block)[top.idx];
      switch (ins.kind) {
        case Instr::Kind::RegAssign:
          proc.regs[ins.reg] = eval_expr(*ins.expr, proc.regs);
          top.idx++;
          break;
        case Instr::Kind::Assume:
          if (eval_expr(*ins.expr, proc.regs) == 0) return {StepKind::AssumeFailed, -1, {}};
          top.idx++;
          break;
        case Instr::Kind::Assert:
          if (eval_expr(*ins.expr, proc.regs) == 0) record_violation(st, ins);
          top.idx++;
          break;
        case Instr::Kind::If: {
          bool cond = eval_expr(*ins.expr, proc.regs) != 0;
          top.idx++;
          const std::vector<Instr>* branch = cond ? &ins.body : &ins.else_body;
          if (!branch->empty()) rt.stack.push_back({branch, 0});
          break;
        }
        case Instr::Kind::SharedWrite: {
          int v = prog_.var_index(ins.var);
          Value val = eval_expr(*ins.expr, proc.regs);
          rt.log[v] = val;
          st.trace.record_write(rt.t, v, val);
          top.idx++;
          Event we;
          we.kind = Event::Kind::Write;
          we.t = rt.t;
          we.var = v;
          append(st, we);
          break;
        }
        case Instr::Kind::SharedRead: {
          int v = prog_.var_index(ins.var);
          auto own = rt.log.find(v);
          if (own != rt.log.end()) {
            proc.regs[ins.reg] = own->second;
            top.idx++;
            Event e;
            e.kind = Event::Kind::Read;
            e.t = rt.t;
            e.src = rt.t;
            e.var = v;
            e.localread = true;
            append(st, e);
            break;
          }
          auto pinned = rt.currentreads.find(v);
          if (pinned != rt.currentreads.end()) {
            proc.regs[ins.reg] = st.trace.last_write(pinned->second, v);
            top.idx++;
            Event e;
            e.kind = Event::Kind::Read;
            e.t = rt.t;
            e.src = pinned->second;
            e.var = v;
            append(st, e);
            break;
          }
          top.idx++;  // source chosen by the caller
          return {StepKind::FreshRead, v, ins.reg};
        }
        case Instr::Kind::Loop:
          throw std::logic_error("loop survived unrolling");
      }
    }
    Tid t = rt.t;
    st.active.reset();
    Event e;
    e.kind = Event::Kind::End;
    e.t = t;
    append(st, e);
    return {StepKind::Done, -1, {}};
  }

  void freeze_active(ExState& st) {
    st.frozen.insert(st.active->t.proc);
    st.dead.insert(st.active->t);
    st.active.reset();
  }

  void do_read(ExState& st, int var, const std::string& dest, Tid src,
               bool swappable, uint64_t fid) {
    TxnRT& rt = *st.active;
    engine_.do_read(st.trace, rt.t, var, src);
    st.procs[rt.t.proc].regs[dest] = st.trace.last_write(src, var);
    rt.currentreads[var] = src;
    Event e;
    e.kind = Event::Kind::Read;
    e.t = rt.t;
    e.src = src;
    e.var = var;
    e.swappable = swappable;
    e.frame_id = fid;
    append(st, e);
  }

  void append(ExState& st, Event e) {
    st.pi.push_back(e);
    report_.nodes++;
    if (cfg_.max_nodes && report_.nodes > *cfg_.max_nodes) throw BudgetExceeded{};
  }

  void register_trace(const ExState& st) {
    WeakTrace w = weaken(st.trace);
    auto [it, fresh] = seen_.insert(w.key(prog_.shared_vars));
    (void)it;
    if (fresh) {
      report_.traces.push_back(std::move(w));
      if (cfg_.keep_full_traces) report_.full_traces.push_back(st.trace);
    } else {
      report_.duplicates++;
    }
    if (cfg_.max_traces &&
        report_.traces.size() + report_.duplicates > *cfg_.max_traces)
      throw BudgetExceeded{};
  }

  void record_violation(const ExState& st, const Instr& ins) {
    Violation v;
    v.site = prog_.processes[st.active->t.proc].name + ":" + std::to_string(ins.line);
    for (const Event& e : st.pi)
      v.observation.push_back(event_to_string(e, prog_.shared_vars));
    v.trace = weaken(st.trace);
    report_.violations.push_back(std::move(v));
    if (cfg_.stop_at_first) throw StopExploration{};
  }

  /* Pairs the writer that just ended with earlier pending reads of the
   * variables it wrote, building one reordering schedule per read. */
  void create_schedules(ExState& st, Tid t2) {
    const Trace& tr = st.trace;
    if (tr.node(t2).writes.empty()) return;
    const ObservationSequence& pi = st.pi;
    size_t k = pi.size();
    while (k > 0 && !(pi[k - 1].kind == Event::Kind::Begin && pi[k - 1].t == t2)) k--;
    assert(k > 0);
    k--;  // pi[k] == (begin, t2)
    for (size_t i = k; i-- > 0;) {
      const Event& er = pi[i];
      if (er.kind != Event::Kind::Read || !er.swappable || er.localread) continue;
      int x = er.var;
      Tid t1 = er.t;
      if (t1 == t2 || !tr.writes_var(t2, x)) continue;
      if (tr.reach_porf(t1, t2)) continue;
      // the reads the schedule keeps: the reader's external reads before
      // the pivot (the pivot itself is re-sourced, later reads re-explored)
      std::vector<std::pair<int, Tid>> kept = kept_reads(pi, i, t1);
      if (engine_.schedule_blocked(tr, kept, x, t2)) continue;
      if (overwrites_kept(tr, t2, kept)) continue;
      build_schedule(st, i, k, t1, t2, kept);
    }
  }

  static std::vector<std::pair<int, Tid>> kept_reads(const ObservationSequence& pi,
                                                     size_t read_pos, Tid t1) {
    std::vector<std::pair<int, Tid>> kept;
    size_t b = read_pos;
    while (!(pi[b].kind == Event::Kind::Begin && pi[b].t == t1)) b--;
    for (size_t q = b; q < read_pos; q++) {
      const Event& e = pi[q];
      if (e.kind != Event::Kind::Read || e.localread) continue;
      bool seen = false;
      for (const auto& [v, s] : kept) seen |= v == e.var;
      if (!seen) kept.emplace_back(e.var, e.src);
    }
    return kept;
  }

  static bool overwrites_kept(const Trace& tr, Tid t2,
                              const std::vector<std::pair<int, Tid>>& kept) {
    // initializers are causally before everything: any hoisted writer of y
    // lands after them and overwrites the kept read
    for (const auto& [y, src] : kept)
      if (tr.writes_var(t2, y) && (src.is_init() || tr.reach_porf(src, t2)))
        return true;
    return false;
  }

  void build_schedule(ExState& st, size_t read_pos, size_t begin_t2, Tid t1,
                      Tid t2, const std::vector<std::pair<int, Tid>>& kept) {
    const Trace& tr = st.trace;
    const ObservationSequence& pi = st.pi;
    // end of the reader's observable (its events are contiguous; a frozen
    // reader has no End event), then scan up to (begin, t2)
    size_t j = read_pos;
    while (j + 1 < begin_t2 && pi[j + 1].t == t1) j++;
    Schedule beta;
    size_t pos = j + 1;
    while (pos < begin_t2) {
      assert(pi[pos].kind == Event::Kind::Begin);
      Tid tpp = pi[pos].t;
      size_t end = pos;
      while (end + 1 < begin_t2 && pi[end + 1].t == tpp) end++;
      bool finished = pi[end].kind == Event::Kind::End;
      // an unfinished observable never published, so nothing depends on it
      if (finished && tr.reach_porf(tpp, t2)) {
        if (tr.reach_porf(t1, tpp) || overwrites_kept(tr, tpp, kept)) return;
        for (size_t q = pos; q <= end; q++) beta.events.push_back(pi[q]);
      }
      pos = end + 1;
    }
    // the writer's observable, then the reader up to the pivot read
    for (size_t q = begin_t2; q < pi.size(); q++) beta.events.push_back(pi[q]);
    size_t begin_t1 = read_pos;
    while (!(pi[begin_t1].kind == Event::Kind::Begin && pi[begin_t1].t == t1))
      begin_t1--;
    for (size_t q = begin_t1; q < read_pos; q++) beta.events.push_back(pi[q]);
    Event pivot = pi[read_pos];
    pivot.src = t2;
    beta.events.push_back(pivot);

    auto it = frames_.find(pi[read_pos].frame_id);
    assert(it != frames_.end());
    ReadFrame* frame = it->second;
    if (schedule_is_novel(frame->schedules, beta)) {
      frame->schedules.push_back(beta);
      report_.schedules_created++;
      if (cfg_.log_schedules) {
        std::ostringstream os;
        for (const Event& e : beta.events)
          os << event_to_string(e, prog_.shared_vars);
        report_.schedule_log.push_back(os.str());
      }
    }
  }

  /* Replays a schedule from the state preceding the reader's transaction,
   * pinning every replayed external read to its recorded source, then
   * resumes the normal exploration mid-transaction after the pivot read.
   * Replayed reads are not swappable, so they spawn no further schedules. */
  void run_schedule(const ExState& pre, const Schedule& beta) {
    struct Section {
      Tid t;
      std::vector<std::pair<int, Tid>> reads;  // fresh external reads in order
    };
    std::vector<Section> sections;
    for (const Event& ev : beta.events) {
      if (ev.kind == Event::Kind::Begin) sections.push_back({ev.t, {}});
      if (ev.kind == Event::Kind::Read && !ev.localread) {
        Section& s = sections.back();
        bool pinned = false;  // repeated external reads of a var are pinned
        for (const auto& [v, src] : s.reads) pinned |= v == ev.var;
        if (!pinned) s.reads.emplace_back(ev.var, ev.src);
      }
    }
    ExState st = pre;
    ExState pre2 = pre;  // state before the reader's transaction begins
    for (size_t si = 0; si < sections.size(); si++) {
      Section& sec = sections[si];
      bool last = si + 1 == sections.size();
      if (last) pre2 = st;
      if (st.procs[sec.t.proc].next_txn != static_cast<size_t>(sec.t.pos))
        throw std::logic_error("schedule replay out of program order");
      begin_txn(st, sec.t.proc);
      size_t next_read = 0;
      while (!last || next_read < sec.reads.size()) {
        StepResult r = step(st);
        if (r.kind == StepKind::AssumeFailed) {
          // replayed observables rerun with their recorded sources, so only
          // the pivot transaction can newly fail here
          freeze_active(st);
          explore(std::move(st));
          return;
        }
        if (r.kind == StepKind::Done) {
          if (last || next_read != sec.reads.size())
            throw std::logic_error("schedule replay diverged at transaction end");
          break;
        }
        if (next_read >= sec.reads.size() || sec.reads[next_read].first != r.var)
          throw std::logic_error("schedule replay diverged at a read");
        bool is_pivot = last && next_read + 1 == sec.reads.size();
        Tid src = sec.reads[next_read++].second;
        if (!source_readable(st, src, r.var)) {
          // the hoisted context can force conflicts the creation-time
          // guards cannot see; the pivot pairing is inconsistent here
          if (is_pivot) return;
          throw std::logic_error("schedule replay chose an unreadable source");
        }
        do_read(st, r.var, r.dest_reg, src, /*swappable=*/false, 0);
        if (is_pivot) break;  // pivot consumed
      }
    }
    run_txn(std::move(st), pre2);
  }

  bool source_readable(const ExState& st, Tid src, int var) const {
    std::vector<Tid> rbl = engine_.readable(st.trace, st.active->t, var);
    return std::find(rbl.begin(), rbl.end(), src) != rbl.end();
  }

  const Program& prog_;
  const RunConfig& cfg_;
  const Engine& engine_;
  ExplorationReport report_;
  std::set<std::string> seen_;
  std::map<uint64_t, ReadFrame*> frames_;
  uint64_t next_frame_id_ = 1;
};

}  // namespace

ExplorationReport explore(const Program& p, const RunConfig& cfg) {
  if (program_has_loops(p)) throw std::invalid_argument("program must be unrolled");
  Explorer ex(p, cfg);
  return ex.run();
}

}  // namespace cmc
