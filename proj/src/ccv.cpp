#include "causalmc/ccv.h"

#include <algorithm>

namespace cmc {

bool is_fulfilled_ccv(const Trace& tr) {
  std::vector<Tid> txns = tr.transactions();
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    // every other writer of e.var that po∪rf-reaches the reader must
    // happen before the source; co chains follow by transitivity
    for (const Tid& t : txns) {
      if (t == e.src || t == e.dst) continue;
      if (!tr.writes_var(t, e.var)) continue;
      if (tr.reach_porf(t, e.dst) && !tr.reach_hb(t, e.src)) return false;
    }
  }
  return true;
}

bool is_partially_good_ccv(const Trace& tr) {
  if (!tr.is_acyclic()) return false;
  std::vector<Tid> txns = tr.transactions();
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    for (const Tid& t : txns) {
      if (t == e.src) continue;
      if (!tr.writes_var(t, e.var)) continue;
      if (tr.reach_porf(t, e.dst) && !tr.reach_hb(t, e.src)) return false;
    }
  }
  return true;
}

std::vector<Trace::CoEdge> forced_co_edges(const Trace& tr) {
  std::vector<Trace::CoEdge> out;
  std::vector<Tid> txns = tr.transactions();
  for (const Trace::RfEdge& e : tr.rf_edges())
    for (const Tid& t : txns) {
      if (t == e.src || t.is_init()) continue;
      if (!tr.writes_var(t, e.var)) continue;
      if (tr.reach_porf(t, e.dst)) out.push_back({t, e.src, e.var});
    }
  return out;
}

bool is_ccv_consistent(const Trace& tr) {
  Trace sat = tr;
  for (const Trace::CoEdge& e : forced_co_edges(tr)) {
    if (e.dst.is_init()) return false;  // a real writer cannot precede init
    sat.add_co(e.src, e.dst, e.var);
  }
  return sat.is_acyclic();
}

namespace {

/* The four exclusion patterns of the read transition. `cand` is the
 * potential rf source for `reader`'s external read of `var`. On a
 * fulfilled, partially good trace these are exactly the candidates whose
 * forced co edges would close a happens-before cycle. */
bool cond1(const Trace& tr, Tid reader, int var, Tid cand) {
  for (const Tid& t3 : tr.writers_of(var)) {
    if (t3 == cand || t3 == reader) continue;
    if (tr.reach_porf(t3, reader) && tr.reach_hb(cand, t3)) return true;
  }
  return false;
}

bool cond2(const Trace& tr, Tid reader, int var, Tid cand) {
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    if (e.dst != reader || e.var == var || e.src == cand) continue;
    if (tr.writes_var(e.src, var) && tr.writes_var(cand, e.var)) return true;
  }
  return false;
}

bool cond3(const Trace& tr, Tid reader, int var, Tid cand) {
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    if (e.dst != reader || e.var == var || e.src == cand) continue;
    for (const Tid& t3 : tr.writers_of(e.var)) {
      if (t3 == e.src) continue;
      if (!tr.reach_hb(e.src, t3)) continue;
      if (t3 == cand || tr.reach_porf(t3, cand)) return true;
    }
  }
  return false;
}

bool cond4(const Trace& tr, Tid reader, int var, Tid cand) {
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    if (e.dst != reader || e.var == var || e.src == cand) continue;
    if (!tr.writes_var(cand, e.var)) continue;
    for (const Tid& t3 : tr.writers_of(var)) {
      if (t3 == cand || t3 == reader) continue;
      if (tr.reach_porf(t3, reader) && tr.reach_hb(e.src, t3)) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Tid> readable_set(const ReadContext& ctx) {
  const Trace& tr = ctx.trace;
  if (!tr.contains(ctx.reader)) throw TraceError("unknown reader");
  std::vector<Tid> out;
  for (const Tid& cand : tr.writers_of(ctx.var)) {
    if (cand == ctx.reader) continue;
    if (cond1(tr, ctx.reader, ctx.var, cand)) continue;
    if (cond2(tr, ctx.reader, ctx.var, cand)) continue;
    if (cond3(tr, ctx.reader, ctx.var, cand)) continue;
    if (cond4(tr, ctx.reader, ctx.var, cand)) continue;
    out.push_back(cand);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Tid> visible_set(const ReadContext& ctx) {
  std::vector<Tid> out;
  for (const Tid& t : readable_set(ctx))
    if (ctx.trace.reach_porf(t, ctx.reader)) out.push_back(t);
  return out;
}

void apply_read_unchecked(Trace& tr, Tid reader, int var, Tid source) {
  tr.add_rf(source, reader, var);
  // Materialize the coherence the new edge forces. For every variable the
  // reader has read, each writer of it that now po∪rf-reaches the reader
  // must be coherence-before that read's source. This covers the visible
  // writers of `var`, the source overwriting the reader's other reads, and
  // writers reaching the reader only through the new edge. Pairs already
  // ordered by happens-before are skipped.
  const TxnNode& node = tr.node(reader);
  std::vector<std::pair<int, Tid>> reads(node.reads.begin(), node.reads.end());
  for (const auto& [y, s] : reads) {
    if (s.is_init()) continue;  // readability guarantees no writer reaches the reader
    for (const Tid& u : tr.writers_of(y)) {
      if (u == s || u == reader || u.is_init()) continue;
      if (!tr.reach_porf(u, reader)) continue;
      if (!tr.reach_hb(u, s)) tr.add_co(u, s, y);
    }
  }
}

Trace apply_read(const ReadContext& ctx, Tid source) {
  std::vector<Tid> rbl = readable_set(ctx);
  if (std::find(rbl.begin(), rbl.end(), source) == rbl.end())
    throw TraceError("read source is not readable");
  Trace out = ctx.trace;
  apply_read_unchecked(out, ctx.reader, ctx.var, source);
  return out;
}

}  // namespace cmc
