#ifndef CAUSALMC_DPOR_H
#define CAUSALMC_DPOR_H

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "causalmc/engine.h"
#include "causalmc/prog.h"
#include "causalmc/trace.h"

namespace cmc {

struct Event {
  enum class Kind { Begin, Write, Read, End };
  Kind kind = Kind::Begin;
  Tid t;
  Tid src;            // Read only
  int var = -1;       // Read/Write
  bool swappable = false;
  bool localread = false;
  uint64_t frame_id = 0;  // nonzero for reads with a pending-schedule frame
};

using ObservationSequence = std::vector<Event>;

std::string event_to_string(const Event& e, const std::vector<std::string>& vars);

/* A stored reordering: complete observables for the transactions hoisted
 * before the postponed writer, the writer itself, then the reader's events
 * up to the pivot read sourced from the writer. */
struct Schedule {
  ObservationSequence events;
  std::string key(const std::vector<std::string>& vars) const;
};

/* True when no existing schedule has the same transaction sequence and
 * rf source assignments. */
bool schedule_is_novel(const std::vector<Schedule>& existing, const Schedule& candidate);

struct Violation {
  std::string site;                     // "process:line"
  std::vector<std::string> observation; // rendered observation sequence
  WeakTrace trace;
};

struct ExplorationReport {
  Model model = Model::CCV;
  std::vector<WeakTrace> traces;  // distinct, in exploration order
  uint64_t duplicates = 0;        // optimality demands 0
  std::vector<Violation> violations;
  uint64_t nodes = 0;             // events appended over the whole exploration
  uint64_t schedules_created = 0;
  std::vector<Trace> full_traces;  // with co; filled when keep_full_traces
  bool budget_exceeded = false;
  double millis = 0;
  std::vector<std::string> schedule_log;  // filled when log_schedules is set

  bool unsafe() const { return !violations.empty(); }
};

struct RunConfig {
  Model model = Model::CCV;
  int unroll_bound = 4;
  std::optional<uint64_t> max_traces;
  std::optional<uint64_t> max_nodes;
  bool stop_at_first = false;
  bool oracle_check = false;
  bool log_schedules = false;
  bool keep_full_traces = false;
};

/* Explores every consistent weak trace of the (loop-free) program exactly
 * once under the selected model, evaluating assertions along the way. */
ExplorationReport explore(const Program& p, const RunConfig& cfg);

}  // namespace cmc

#endif
