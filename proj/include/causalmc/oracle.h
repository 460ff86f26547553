#ifndef CAUSALMC_ORACLE_H
#define CAUSALMC_ORACLE_H

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "causalmc/engine.h"
#include "causalmc/prog.h"
#include "causalmc/trace.h"

namespace cmc {

/* ---- Operational interpreters (ground truth, desk scale only) ---- */

using VectorClock = std::vector<uint64_t>;  // one component per process

/* -1 while no transaction id applies (initial store entries). */
struct CcStoreEntry {
  Value value = 0;
  std::optional<Tid> writer;       // nullopt = initializer
  VectorClock clock;               // zero clock for initializer entries
};

struct CcvLocalState {
  size_t next_txn = 0;             // program counter at transaction granularity
  bool in_txn = false;
  size_t instr = 0;                // flattened instruction cursor inside the body
  std::vector<std::pair<int, Value>> log;
  std::map<int, Value> store;
  std::map<int, Tid> store_src;    // provenance per variable
  RegisterValuation regs;
  std::map<int, uint64_t> ts;      // per-variable timestamp
};

struct CcLocalState {
  size_t next_txn = 0;
  bool in_txn = false;
  size_t instr = 0;
  std::vector<std::pair<int, Value>> log;
  std::map<int, std::vector<CcStoreEntry>> store;  // per-variable antichain
  RegisterValuation regs;
  VectorClock ts;
  std::map<int, CcStoreEntry> snapshot;  // per-variable pick, fixed per transaction
};

struct OpMessage {
  Tid t;
  uint64_t id = 0;        // CCv timestamp
  VectorClock clock;      // CC vector clock
  std::vector<std::pair<int, Value>> log;
};

/* Shared configuration shape: exactly one of the local-state vectors is
 * populated, depending on the model the configuration was built for. */
struct Configuration {
  Model model = Model::CCV;
  std::vector<CcvLocalState> ccv;
  std::vector<CcLocalState> cc;
  std::vector<OpMessage> msgs;
  std::set<std::pair<int, int>> delivered;  // (process, message index)
};

Configuration initial_configuration(const Program& p, Model m);

/* Transition labels. Begin carries the CCv timestamp choice; Exec runs the
 * next instruction of the open transaction (reads resolve from log, then
 * store or snapshot); Del delivers message `msg` to `proc`. SnapshotPick
 * pins the CC snapshot entry for one variable before it is first read. */
struct OpLabel {
  enum class Kind { Begin, Exec, End, Del, SnapshotPick };
  Kind kind = Kind::Exec;
  int proc = 0;
  uint64_t id = 0;   // Begin (CCv)
  int msg = -1;      // Del
  int var = -1;      // SnapshotPick
  int entry = -1;    // SnapshotPick: index into store[var]
};

struct OpError : std::runtime_error {
  explicit OpError(const std::string& m) : std::runtime_error(m) {}
};

/* Single-step transition; throws OpError when the label is not enabled. */
Configuration step_ccv(const Program& p, const Configuration& c, const OpLabel& l);
Configuration step_cc(const Program& p, const Configuration& c, const OpLabel& l);

/* ---- Exhaustive axiomatic enumeration ---- */

struct OracleGuardExceeded : std::runtime_error {
  explicit OracleGuardExceeded(const std::string& m) : std::runtime_error(m) {}
};

/* Every model-consistent weak trace of a terminating execution: enumerate
 * all po-respecting linearizations, resolve every external read against
 * every earlier writer, keep the complete rf assignments that pass the
 * model's consistency predicate. */
std::set<WeakTrace> enumerate_weak_traces(const Program& p, Model m,
                                          int guard = 12);

/* Independent second route: exhaustive interleaving of issue/deliver
 * steps under causal delivery and transaction isolation; for CCv all
 * relative timestamp orders are enumerated, for CC all snapshot picks. */
std::set<WeakTrace> enumerate_operational(const Program& p, Model m,
                                          int guard = 8);

/* ---- Execution summaries ---- */

struct SummaryEvent {
  enum class Kind { Isu, Del };
  Kind kind = Kind::Isu;
  int proc = 0;
  Tid t;
  bool operator==(const SummaryEvent&) const = default;
};

struct ExecutionSummary {
  std::vector<SummaryEvent> events;
  /* CCv timestamp order (position = rank); carries the id information the
   * legality conditions quantify over. Unused for CC, where the id order
   * is the causal order derived from the events themselves. */
  std::map<Tid, uint64_t> rank;
};

std::string summary_to_string(const ExecutionSummary& s,
                              const std::vector<std::string>& vars);

/* Legal and consistent with the trace: reads hit the latest (CCv) or a
 * maximal-or-concurrent (CC) delivered write, delivery order respects
 * store-before-issue propagation, and every delivery follows its issue. */
bool check_legal_summary(const ExecutionSummary& s, const Trace& tr, Model m);

/* Builds a legal, trace-consistent summary for a total consistent trace.
 * Throws TraceError when the trace is not consistent. */
ExecutionSummary summarize(const Trace& tr, Model m);

/* Extends a consistent partial trace with co edges until every pair of
 * same-variable writers is ordered. CCv only. */
Trace totalize_co(const Trace& tr);

}  // namespace cmc

#endif
