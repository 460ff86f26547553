#ifndef CAUSALMC_CCV_H
#define CAUSALMC_CCV_H

#include <vector>

#include "causalmc/trace.h"

namespace cmc {

struct ReadContext {
  const Trace& trace;
  Tid reader;
  int var;
};

/* Fulfilled (causal-convergence): for distinct writers t, t' of x, whenever
 * t po∪rf-reaches some t'' that reads x from t', t happens before t'
 * ([po ∪ rf ∪ co]+ with the implicit init edges). */
bool is_fulfilled_ccv(const Trace& tr);

/* Partially good: (i) every writer of x that po∪rf-precedes a reader of x
 * happens before that reader's rf source, and (ii) [po ∪ rf ∪ co]+ is
 * irreflexive. */
bool is_partially_good_ccv(const Trace& tr);

/* Sources the pending external read may take without breaking consistency.
 * Canonical order: initializers first, then (process, position). */
std::vector<Tid> readable_set(const ReadContext& ctx);

/* Readable sources that already po∪rf-reach the reader. */
std::vector<Tid> visible_set(const ReadContext& ctx);

/* Adds the rf edge plus the co edges forced by fulfilledness: visible
 * writers of x become co-before the source, and the source becomes
 * co-before every source of the reader's other-variable reads it also
 * writes. Requires source ∈ readable_set. */
Trace apply_read(const ReadContext& ctx, Tid source);

/* Same, in place, without the readable-set precondition check. */
void apply_read_unchecked(Trace& tr, Tid reader, int var, Tid source);

/* Whether the partial trace extends to a total CCv-consistent trace:
 * materializes the co edges forced by condition (i) and checks acyclicity. */
bool is_ccv_consistent(const Trace& tr);

/* co edges forced by condition (i); the saturation step of the
 * consistency check, exposed for the total-order extension helper. */
std::vector<Trace::CoEdge> forced_co_edges(const Trace& tr);

}  // namespace cmc

#endif
