#include "causalmc/engine.h"

#include <stdexcept>

namespace cmc {

std::string model_name(Model m) { return m == Model::CCV ? "ccv" : "cc"; }

Model model_from_string(const std::string& s) {
  if (s == "ccv" || s == "CCV") return Model::CCV;
  if (s == "cc" || s == "CC") return Model::CC;
  throw std::invalid_argument("unknown model '" + s + "' (expected ccv or cc)");
}

namespace {

class CcvEngine final : public Engine {
 public:
  Model model() const override { return Model::CCV; }

  std::vector<Tid> readable(const Trace& tr, Tid reader, int var) const override {
    return readable_set({tr, reader, var});
  }

  void do_read(Trace& tr, Tid reader, int var, Tid source) const override {
    apply_read_unchecked(tr, reader, var, source);
  }

  bool schedule_blocked(const Trace& tr,
                        const std::vector<std::pair<int, Tid>>& kept, int var,
                        Tid t2) const override {
    // the reader keeps a read of y from a transaction that also writes
    // var, while t2 writes both; swapping would force a co cycle
    for (const auto& [y, src] : kept)
      if (tr.writes_var(t2, y) && tr.writes_var(src, var)) return true;
    return false;
  }

  bool trace_ok(const Trace& tr) const override {
    return is_fulfilled_ccv(tr) && is_partially_good_ccv(tr);
  }

  bool consistent(const Trace& tr) const override { return is_ccv_consistent(tr); }
};

class CcEngine final : public Engine {
 public:
  Model model() const override { return Model::CC; }

  std::vector<Tid> readable(const Trace& tr, Tid reader, int var) const override {
    return readable_set_cc({tr, reader, var});
  }

  void do_read(Trace& tr, Tid reader, int var, Tid source) const override {
    tr.add_rf(source, reader, var);
  }

  bool schedule_blocked(const Trace&, const std::vector<std::pair<int, Tid>>&,
                        int, Tid) const override {
    return false;
  }

  bool trace_ok(const Trace& tr) const override {
    return is_fulfilled_cc(tr) && is_partially_good_cc(tr);
  }

  bool consistent(const Trace& tr) const override { return is_cc_consistent(tr); }
};

}  // namespace

const Engine& engine_for(Model m) {
  static const CcvEngine ccv;
  static const CcEngine cc;
  if (m == Model::CCV) return ccv;
  return cc;
}

}  // namespace cmc
