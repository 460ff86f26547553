#ifndef CAUSALMC_TRACE_H
#define CAUSALMC_TRACE_H

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "causalmc/prog.h"

namespace cmc {

inline constexpr int kInitProc = -1;

/* Transaction identifier: (process index, position within process).
 * Initializer transactions use (kInitProc, variable index). */
struct Tid {
  int proc = 0;
  int pos = 0;
  auto operator<=>(const Tid&) const = default;
  bool is_init() const { return proc == kInitProc; }
};

inline Tid init_tid(int var) { return Tid{kInitProc, var}; }

std::string tid_name(Tid t, const std::vector<std::string>& vars);

struct TraceError : std::runtime_error {
  explicit TraceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TxnNode {
  Tid id;
  std::map<int, Value> writes;  // variable -> last written value
  std::map<int, Tid> reads;     // variable -> external source
};

/* A (partial) trace: transaction nodes plus po, rf and co edges.
 * Initializer nodes exist for every variable and are co-minimal: the
 * edge init_x -co^x-> w is implicit for every other writer w of x.
 * Reachability closures are memoized and rebuilt after any mutation. */
class Trace {
 public:
  explicit Trace(int num_vars);

  int num_vars() const { return num_vars_; }
  bool contains(Tid t) const;
  const TxnNode& node(Tid t) const;
  std::vector<Tid> transactions() const;  // canonical order, initializers first
  int size() const { return static_cast<int>(nodes_.size()); }

  /* Adds a node plus the po edge from its process predecessor. */
  void add_transaction(Tid t);
  void record_write(Tid t, int var, Value v);
  void add_rf(Tid src, Tid dst, int var);
  void add_co(Tid a, Tid b, int var);

  bool has_rf(Tid src, Tid dst, int var) const;
  std::optional<Tid> rf_source(Tid reader, int var) const;
  bool writes_var(Tid t, int var) const;
  Value last_write(Tid t, int var) const;
  std::vector<Tid> writers_of(int var) const;  // includes init_var

  struct RfEdge { Tid src, dst; int var; };
  struct CoEdge { Tid src, dst; int var; };
  const std::vector<std::pair<Tid, Tid>>& po_edges() const { return po_; }
  const std::vector<RfEdge>& rf_edges() const { return rf_; }
  const std::vector<CoEdge>& co_edges() const { return co_; }  // explicit only

  /* a [po ∪ rf ∪ co]+ b, with the implicit initializer co edges. */
  bool reach_hb(Tid a, Tid b) const;
  /* a [po ∪ rf]+ b. */
  bool reach_porf(Tid a, Tid b) const;
  /* Neither reaches the other through po ∪ rf; false when a == b. */
  bool concurrent(Tid a, Tid b) const;
  bool is_acyclic() const;

  /* Causality order used by the CC predicates: po ∪ rf paths, with
   * initializers ordered before every real transaction. */
  bool ord_cc(Tid a, Tid b) const;

  /* Number of primitive relation queries answered so far (perf tests). */
  uint64_t query_count() const { return queries_; }
  void reset_query_count() { queries_ = 0; }

 private:
  int index(Tid t) const;
  void invalidate();
  void ensure_closures() const;

  int num_vars_;
  std::vector<TxnNode> nodes_;
  std::map<Tid, int> index_;
  std::vector<std::pair<Tid, Tid>> po_;
  std::vector<RfEdge> rf_;
  std::vector<CoEdge> co_;

  mutable bool closures_valid_ = false;
  mutable std::vector<std::vector<bool>> hb_;    // po ∪ rf ∪ co (incl. init edges)
  mutable std::vector<std::vector<bool>> porf_;  // po ∪ rf
  mutable uint64_t queries_ = 0;
};

/* Canonical weak trace: nodes plus sorted po and rf edge lists; the
 * deduplication key of the exploration. */
struct WeakTrace {
  std::vector<Tid> txns;
  std::vector<std::pair<Tid, Tid>> po;
  std::vector<std::tuple<Tid, Tid, int>> rf;  // (src, dst, var)
  auto operator<=>(const WeakTrace&) const = default;

  std::string key(const std::vector<std::string>& vars) const;
};

WeakTrace weaken(const Trace& tr);

uint64_t fnv1a64(const std::string& s);

}  // namespace cmc

#endif
