#include <doctest.h>

#include "causalmc/report.h"
#include "helpers.h"

using namespace cmc;

namespace {

Program demo_program() {
  return parse_program(
      "var x; process a { transaction { x := 1; } } "
      "process b { transaction { r := x; assert(r == 0); } }");
}

ExplorationReport demo_report(Model m) {
  RunConfig cfg;
  cfg.model = m;
  return explore(demo_program(), cfg);
}

}  // namespace

TEST_CASE("report json carries verdict, counts and violations") {
  Program p = demo_program();
  ExplorationReport r = demo_report(Model::CCV);
  std::string j = report_to_json("demo.tpl", p, r);
  CHECK(j.find("\"verdict\": \"UNSAFE\"") != std::string::npos);
  CHECK(j.find("\"duplicates\": 0") != std::string::npos);
  CHECK(j.find("assert_site") != std::string::npos);
  CHECK(j.find("observation_sequence") != std::string::npos);
}

TEST_CASE("identical runs serialize identically") {
  Program p = demo_program();
  std::string a = report_to_json("demo.tpl", p, demo_report(Model::CC));
  std::string b = report_to_json("demo.tpl", p, demo_report(Model::CC));
  // wall time lives in its own stats field; blank it before comparing
  auto strip = [](std::string s) {
    size_t pos = s.find("\"millis\"");
    if (pos != std::string::npos) {
      size_t end = s.find('\n', pos);
      s.erase(pos, end - pos);
    }
    return s;
  };
  CHECK(strip(a) == strip(b));
}

TEST_CASE("weak traces round-trip through json") {
  Program p = demo_program();
  ExplorationReport r = demo_report(Model::CCV);
  REQUIRE(!r.traces.empty());
  for (const WeakTrace& w : r.traces) {
    std::string j = weak_trace_to_json(w, p);
    WeakTrace back = weak_trace_from_json(j);
    CHECK(back == w);
    CHECK(weak_trace_hash(back, p) == weak_trace_hash(w, p));
  }
}

TEST_CASE("dot export styles the three relations") {
  Trace tr = testutil::pair_trace_consistent();
  Program p;
  p.shared_vars = {"x", "y", "z"};
  std::string dot = trace_to_dot(tr, p);
  CHECK(dot.find("style=solid") != std::string::npos);    // po
  CHECK(dot.find("style=dashed") != std::string::npos);   // rf
  CHECK(dot.find("style=dotted") != std::string::npos);   // co
  CHECK(dot.find("init_x") != std::string::npos);
  CHECK(dot.find("p0.t0") != std::string::npos);
  std::string wdot = weak_trace_to_dot(weaken(tr), p);
  CHECK(wdot.find("style=dotted") == std::string::npos);  // co erased
}

TEST_CASE("trace hashes are stable") {
  Program p = demo_program();
  ExplorationReport r = demo_report(Model::CCV);
  for (const WeakTrace& w : r.traces)
    CHECK(weak_trace_hash(w, p) == fnv1a64(w.key(p.shared_vars)));
}
