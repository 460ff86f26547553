#ifndef CAUSALMC_TESTS_HELPERS_H
#define CAUSALMC_TESTS_HELPERS_H

#include <optional>
#include <random>
#include <string>

#include "causalmc/engine.h"
#include "causalmc/prog.h"
#include "causalmc/trace.h"

namespace cmc::testutil {

/* Trace with an open reader t7 whose readable set for y is {t2,t4,t5,t8}
 * and whose visible set is {t2,t4}. Variables: x=0, y=1, v=2, z=3. */
Trace visibility_fixture();

/* Two-process trace where the second process's reads pin the coherence
 * order between the y writers; consistent and inconsistent variants. */
Trace pair_trace_consistent();
Trace pair_trace_inconsistent();

/* Random-program generation for the differential suites. */
struct GenOpts {
  int max_procs = 3;
  int max_txns = 2;
  int max_instrs = 3;
  int max_vars = 2;
  bool control_flow = true;
  bool assumes = true;
};

Program random_program(std::mt19937_64& rng, const GenOpts& opts);

/* A trace grown by a random run of the fulfilled semantics, stopped at a
 * pending external read: the natural input domain of the readable-set
 * checks. Returns nothing when the run finished without a pending read. */
struct ReadPoint {
  Trace trace;
  Tid reader;
  int var;
  ReadPoint(Trace t, Tid r, int v) : trace(std::move(t)), reader(r), var(v) {}
};

std::optional<ReadPoint> random_read_point(std::mt19937_64& rng, Model m,
                                           const GenOpts& opts);

/* Random traces (not necessarily consistent) for the relation tests. */
Trace random_raw_trace(std::mt19937_64& rng, int max_txns, int max_vars,
                       bool with_co);

/* Rebuilds a full trace from a weak trace by re-executing the program with
 * every external read pinned to its recorded source. */
Trace rebuild_trace(const Program& p, const WeakTrace& w);

}  // namespace cmc::testutil

#endif
