#include "causalmc/cc.h"

#include <algorithm>

#include "causalmc/ccv.h"

namespace cmc {

namespace {

bool cc_concurrent(const Trace& tr, Tid a, Tid b) {
  if (a == b) return false;
  return !tr.ord_cc(a, b) && !tr.ord_cc(b, a);
}

bool porf_acyclic(const Trace& tr) {
  for (const Tid& t : tr.transactions())
    if (tr.reach_porf(t, t)) return false;
  return true;
}

}  // namespace

bool is_fulfilled_cc(const Trace& tr) {
  std::vector<Tid> txns = tr.transactions();
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    for (const Tid& t : txns) {
      if (t == e.src || t == e.dst) continue;
      if (!tr.writes_var(t, e.var)) continue;
      if (tr.reach_porf(t, e.dst) && tr.ord_cc(e.src, t)) return false;
    }
  }
  return true;
}

bool is_partially_good_cc(const Trace& tr) {
  if (!porf_acyclic(tr)) return false;
  std::vector<Tid> txns = tr.transactions();
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    for (const Tid& t : txns) {
      if (t == e.src) continue;
      if (!tr.writes_var(t, e.var)) continue;
      if (!tr.reach_porf(t, e.dst) && !(t.is_init() && !e.src.is_init())) continue;
      if (!cc_concurrent(tr, t, e.src) && !tr.ord_cc(t, e.src)) return false;
    }
  }
  return true;
}

bool is_cc_consistent(const Trace& tr) { return is_partially_good_cc(tr); }

namespace {

/* Exclusion checks of the CC read transition for candidate source `cand`. */
bool cc_cond1(const Trace& tr, Tid reader, int var, Tid cand) {
  for (const Tid& t3 : tr.writers_of(var)) {
    if (t3 == cand || t3 == reader) continue;
    if (tr.reach_porf(t3, reader) && tr.ord_cc(cand, t3)) return true;
  }
  return false;
}

bool cc_cond2(const Trace& tr, Tid reader, int var, Tid cand) {
  for (const Trace::RfEdge& e : tr.rf_edges()) {
    if (e.dst != reader || e.var == var || e.src == cand) continue;
    for (const Tid& t3 : tr.writers_of(e.var)) {
      if (t3 == e.src) continue;
      if (!tr.ord_cc(e.src, t3)) continue;
      if (t3 == cand || tr.reach_porf(t3, cand)) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Tid> readable_set_cc(const ReadContext& ctx) {
  const Trace& tr = ctx.trace;
  if (!tr.contains(ctx.reader)) throw TraceError("unknown reader");
  std::vector<Tid> out;
  for (const Tid& cand : tr.writers_of(ctx.var)) {
    if (cand == ctx.reader) continue;
    if (cc_cond1(tr, ctx.reader, ctx.var, cand)) continue;
    if (cc_cond2(tr, ctx.reader, ctx.var, cand)) continue;
    out.push_back(cand);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Trace apply_read_cc(const ReadContext& ctx, Tid source) {
  std::vector<Tid> rbl = readable_set_cc(ctx);
  if (std::find(rbl.begin(), rbl.end(), source) == rbl.end())
    throw TraceError("read source is not readable");
  Trace out = ctx.trace;
  out.add_rf(source, ctx.reader, ctx.var);
  return out;
}

}  // namespace cmc
