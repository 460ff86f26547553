#ifndef CAUSALMC_ENGINE_H
#define CAUSALMC_ENGINE_H

#include <memory>
#include <string>
#include <vector>

#include "causalmc/cc.h"
#include "causalmc/ccv.h"
#include "causalmc/trace.h"

namespace cmc {

enum class Model { CCV, CC };

std::string model_name(Model m);
Model model_from_string(const std::string& s);

/* Consistency engine behind the exploration: supplies the readable set,
 * the read transition, and the model-specific schedule guard. */
class Engine {
 public:
  virtual ~Engine() = default;
  virtual Model model() const = 0;
  virtual std::vector<Tid> readable(const Trace& tr, Tid reader, int var) const = 0;
  /* In place; caller guarantees source is readable. */
  virtual void do_read(Trace& tr, Tid reader, int var, Tid source) const = 0;
  /* The co-cycle guard of schedule creation: `kept` holds the reader's
   * external reads that the schedule will preserve, as (variable, source)
   * pairs. Always false under CC. */
  virtual bool schedule_blocked(const Trace& tr,
                                const std::vector<std::pair<int, Tid>>& kept,
                                int var, Tid t2) const = 0;
  /* Post-hoc soundness check: fulfilled and partially good. */
  virtual bool trace_ok(const Trace& tr) const = 0;
  /* Consistency of a completed trace (used by the oracles). */
  virtual bool consistent(const Trace& tr) const = 0;
};

const Engine& engine_for(Model m);

}  // namespace cmc

#endif
