#ifndef CAUSALMC_CC_H
#define CAUSALMC_CC_H

#include <vector>

#include "causalmc/trace.h"

namespace cmc {

struct ReadContext;

/* CC traces carry no co relation; these predicates ignore any co edges.
 * Initializers are causally before every real transaction. */

/* Fulfilled (weak causal): for distinct writers t, t' of x, whenever t
 * causally precedes a reader of x sourced from t', t and t' are concurrent
 * or t causally precedes t'. */
bool is_fulfilled_cc(const Trace& tr);

/* (i) every writer of x causally before a reader of x is concurrent with,
 * equal to, or causally before the reader's source; (ii) po ∪ rf acyclic. */
bool is_partially_good_cc(const Trace& tr);

/* For complete rf assignments the two conditions above coincide with CC
 * consistency. */
bool is_cc_consistent(const Trace& tr);

std::vector<Tid> readable_set_cc(const ReadContext& ctx);

/* Adds the rf edge; CC keeps no co bookkeeping. */
Trace apply_read_cc(const ReadContext& ctx, Tid source);

}  // namespace cmc

#endif
