#include <doctest.h>

#include <algorithm>
#include <random>

#include "causalmc/cc.h"
#include "causalmc/ccv.h"
#include "causalmc/trace.h"
#include "helpers.h"

using namespace cmc;

namespace {

bool readable_by_insertion_cc(const Trace& tr, Tid reader, int var, Tid cand) {
  Trace t2 = tr;
  t2.add_rf(cand, reader, var);
  return is_partially_good_cc(t2);
}

/* The snapshot-mixing trace: two concurrent writers of x and y, one reader
 * sourcing x and y from different writers. */
Trace mixed_read_trace() {
  Trace tr(2);
  Tid w1{0, 0}, w2{1, 0}, r{2, 0};
  tr.add_transaction(w1);
  tr.add_transaction(w2);
  tr.add_transaction(r);
  tr.record_write(w1, 0, 1);
  tr.record_write(w1, 1, 1);
  tr.record_write(w2, 0, 2);
  tr.record_write(w2, 1, 2);
  tr.add_rf(w1, r, 0);
  tr.add_rf(w2, r, 1);
  return tr;
}

}  // namespace

TEST_CASE("empty trace is partially good") {
  Trace tr(2);
  CHECK(is_partially_good_cc(tr));
  CHECK(is_fulfilled_cc(tr));
}

TEST_CASE("concurrent cross reads are cc consistent") {
  // writers t1, t3 concurrent; a later reader takes y from t1 while an
  // earlier one took y from t3
  Trace tr(3);  // x=0, y=1, z=2
  Tid t1{0, 0}, t2{0, 1}, t3{1, 0}, t4{1, 1}, t5{1, 2};
  for (Tid t : {t1, t2, t3, t4, t5}) tr.add_transaction(t);
  tr.record_write(t1, 0, 1);
  tr.record_write(t1, 1, 1);
  tr.record_write(t2, 2, 1);
  tr.record_write(t3, 1, 2);
  tr.add_rf(t1, t2, 0);
  tr.add_rf(t2, t4, 2);
  tr.add_rf(t3, t4, 1);
  tr.add_rf(t1, t5, 1);
  CHECK(tr.concurrent(t1, t3));
  CHECK(is_partially_good_cc(tr));
  CHECK(is_fulfilled_cc(tr));
  // the same shape is not ccv consistent: t4 pins t1 co t3, t5 needs t3 co t1
  CHECK(!is_ccv_consistent(tr));
}

TEST_CASE("partially good cc matches a quantifier expansion") {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 150; i++) {
    Trace tr = testutil::random_raw_trace(rng, 7, 2, false);
    bool expect = true;
    std::vector<Tid> txns = tr.transactions();
    for (const Tid& t : txns)
      if (tr.reach_porf(t, t)) expect = false;
    for (const Trace::RfEdge& e : tr.rf_edges())
      for (const Tid& t : txns) {
        if (t == e.src || !tr.writes_var(t, e.var)) continue;
        if (!tr.reach_porf(t, e.dst)) continue;
        bool conc = t != e.src && !tr.ord_cc(t, e.src) && !tr.ord_cc(e.src, t);
        if (!conc && !tr.ord_cc(t, e.src)) expect = false;
      }
    CHECK(is_partially_good_cc(tr) == expect);
  }
}

TEST_CASE("sole writer: the initializer is readable") {
  Trace tr(1);
  tr.add_transaction(Tid{0, 0});
  std::vector<Tid> rbl = readable_set_cc({tr, Tid{0, 0}, 0});
  REQUIRE(rbl.size() == 1);
  CHECK(rbl[0] == init_tid(0));
}

TEST_CASE("stale initializer is not readable once a writer is visible") {
  Trace tr(1);
  Tid w{0, 0}, r{1, 0};
  tr.add_transaction(w);
  tr.add_transaction(r);
  tr.record_write(w, 0, 5);
  tr.add_rf(w, r, 0);  // r saw w on x already... pin through another var
  // a second reader with w visible through po
  Tid r2{1, 1};
  tr.add_transaction(r2);
  std::vector<Tid> rbl = readable_set_cc({tr, r2, 0});
  CHECK(std::find(rbl.begin(), rbl.end(), init_tid(0)) == rbl.end());
  CHECK(std::find(rbl.begin(), rbl.end(), w) != rbl.end());
}

TEST_CASE("cc readable set admits a mixed snapshot that ccv forbids") {
  // reading y from the co-read partner is allowed under cc, not under ccv
  Trace tr(2);
  Tid w1{0, 0}, w2{1, 0}, r{2, 0};
  tr.add_transaction(w1);
  tr.add_transaction(w2);
  tr.add_transaction(r);
  tr.record_write(w1, 0, 1);
  tr.record_write(w1, 1, 1);
  tr.record_write(w2, 0, 2);
  tr.record_write(w2, 1, 2);
  tr.add_rf(w1, r, 0);  // x from w1
  std::vector<Tid> cc_rbl = readable_set_cc({tr, r, 1});
  std::vector<Tid> ccv_rbl = readable_set({tr, r, 1});
  CHECK(std::find(cc_rbl.begin(), cc_rbl.end(), w2) != cc_rbl.end());
  CHECK(std::find(ccv_rbl.begin(), ccv_rbl.end(), w2) == ccv_rbl.end());
  CHECK(std::find(ccv_rbl.begin(), ccv_rbl.end(), w1) != ccv_rbl.end());
}

TEST_CASE("mixed-read trace is cc consistent") {
  Trace tr = mixed_read_trace();
  CHECK(is_partially_good_cc(tr));
  CHECK(is_cc_consistent(tr));
  CHECK(!is_ccv_consistent(tr));
}

TEST_CASE("apply_read_cc adds exactly one rf edge") {
  Trace tr(1);
  tr.add_transaction(Tid{0, 0});
  Trace out = apply_read_cc({tr, Tid{0, 0}, 0}, init_tid(0));
  CHECK(out.has_rf(init_tid(0), Tid{0, 0}, 0));
  CHECK(out.co_edges().empty());
  CHECK(out.rf_edges().size() == 1);
}

TEST_CASE("cc readable set equals the tentative-insertion oracle") {
  std::mt19937_64 rng(61);
  testutil::GenOpts opts;
  int checked = 0;
  for (int round = 0; round < 400; round++) {
    auto rp = testutil::random_read_point(rng, Model::CC, opts);
    if (!rp) continue;
    std::vector<Tid> rbl = readable_set_cc({rp->trace, rp->reader, rp->var});
    for (const Tid& cand : rp->trace.writers_of(rp->var)) {
      if (cand == rp->reader) continue;
      bool fast = std::find(rbl.begin(), rbl.end(), cand) != rbl.end();
      bool slow = readable_by_insertion_cc(rp->trace, rp->reader, rp->var, cand);
      CHECK(fast == slow);
      checked++;
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("apply_read_cc keeps traces fulfilled and partially good") {
  std::mt19937_64 rng(67);
  testutil::GenOpts opts;
  int applied = 0;
  for (int round = 0; round < 250; round++) {
    auto rp = testutil::random_read_point(rng, Model::CC, opts);
    if (!rp) continue;
    for (const Tid& src : readable_set_cc({rp->trace, rp->reader, rp->var})) {
      Trace out = apply_read_cc({rp->trace, rp->reader, rp->var}, src);
      CHECK(is_fulfilled_cc(out));
      CHECK(is_partially_good_cc(out));
      applied++;
    }
  }
  CHECK(applied > 120);
}

TEST_CASE("every ccv-consistent trace is cc consistent") {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 200; i++) {
    Trace tr = testutil::random_raw_trace(rng, 6, 2, false);
    if (is_ccv_consistent(tr)) CHECK(is_cc_consistent(tr));
  }
}
