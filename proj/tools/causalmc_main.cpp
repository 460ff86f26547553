#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "causalmc/dpor.h"
#include "causalmc/oracle.h"
#include "causalmc/report.h"

namespace fs = std::filesystem;
using namespace cmc;

namespace {

constexpr int kExitSafe = 0;
constexpr int kExitUnsafe = 1;
constexpr int kExitError = 2;
constexpr int kExitBudget = 3;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct CheckOptions {
  std::string file;
  std::string model = "ccv";
  int unroll = 4;
  bool oracle = false;
  std::string emit;
  std::string out_dir;
  std::string json_path;
  uint64_t max_traces = 0;
  uint64_t max_nodes = 0;
  bool first = false;
};

int run_check(const CheckOptions& opt) {
  Program prog = parse_program(read_file(opt.file), opt.unroll);
  RunConfig cfg;
  cfg.model = model_from_string(opt.model);
  cfg.unroll_bound = opt.unroll;
  cfg.stop_at_first = opt.first;
  if (opt.max_traces) cfg.max_traces = opt.max_traces;
  if (opt.max_nodes) cfg.max_nodes = opt.max_nodes;

  ExplorationReport rep = explore(prog, cfg);
  std::string name = fs::path(opt.file).filename().string();
  std::string json_text = report_to_json(name, prog, rep);
  fs::path json_path =
      opt.json_path.empty() ? fs::path(opt.file + ".report.json") : fs::path(opt.json_path);
  write_file(json_path, json_text);

  std::cout << name << " [" << opt.model << "] "
            << (rep.unsafe() ? "UNSAFE" : "SAFE") << "  traces=" << rep.traces.size()
            << " duplicates=" << rep.duplicates << " nodes=" << rep.nodes
            << " millis=" << rep.millis << "\n";

  if (!opt.emit.empty()) {
    fs::path dir = opt.out_dir.empty() ? fs::path(opt.file + ".traces") : fs::path(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      std::cerr << "error: cannot create output directory " << dir << "\n";
      return kExitError;
    }
    for (const WeakTrace& w : rep.traces) {
      std::ostringstream fn;
      fn << std::hex << weak_trace_hash(w, prog);
      if (opt.emit == "dot")
        write_file(dir / (fn.str() + ".dot"), weak_trace_to_dot(w, prog));
      else
        write_file(dir / (fn.str() + ".json"), weak_trace_to_json(w, prog));
    }
    std::cout << "emitted " << rep.traces.size() << " traces to " << dir.string()
              << "\n";
  }

  if (opt.oracle) {
    std::set<WeakTrace> expected = enumerate_weak_traces(prog, cfg.model);
    std::set<WeakTrace> got(rep.traces.begin(), rep.traces.end());
    if (expected != got) {
      std::cerr << "oracle mismatch: explored " << got.size() << " weak traces, oracle has "
                << expected.size() << "\n";
      return kExitError;
    }
    std::cout << "oracle check passed (" << expected.size() << " weak traces)\n";
  }

  if (rep.budget_exceeded) return kExitBudget;
  return rep.unsafe() ? kExitUnsafe : kExitSafe;
}

int run_corpus(const std::string& dir, const std::string& expect_file, int unroll) {
  std::ifstream in(expect_file);
  if (!in) {
    std::cerr << "error: cannot open expectations file " << expect_file << "\n";
    return kExitError;
  }
  int failures = 0, count = 0;
  double total_ms = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name, ccv_expect, cc_expect;
    if (!(ls >> name >> ccv_expect >> cc_expect)) continue;
    if (name[0] == '#') continue;
    fs::path path = fs::path(dir) / name;
    if (!fs::exists(path)) {
      std::cerr << "error: missing benchmark file " << path.string() << "\n";
      return kExitError;
    }
    Program prog = parse_program(read_file(path), unroll);
    bool ok = true;
    std::ostringstream row;
    row << name;
    for (Model m : {Model::CCV, Model::CC}) {
      RunConfig cfg;
      cfg.model = m;
      ExplorationReport rep = explore(prog, cfg);
      total_ms += rep.millis;
      std::string verdict = rep.unsafe() ? "UNSAFE" : "SAFE";
      const std::string& expect = m == Model::CCV ? ccv_expect : cc_expect;
      row << "  " << model_name(m) << "=" << verdict;
      if (verdict != expect) {
        ok = false;
        row << " (expected " << expect << ")";
      }
    }
    count++;
    if (!ok) failures++;
    std::cout << (ok ? "PASS  " : "FAIL  ") << row.str() << "\n";
  }
  std::cout << count << " programs, " << failures << " failures, total "
            << total_ms << " ms\n";
  return failures == 0 ? kExitSafe : kExitError;
}

int run_validate(const std::string& file) {
  WeakTrace w = weak_trace_from_json(read_file(file));
  // round trip through the canonical form
  std::vector<std::string> vars;
  int max_var = -1;
  for (const auto& [a, b, v] : w.rf) max_var = std::max(max_var, v);
  for (const Tid& t : w.txns)
    if (t.is_init()) max_var = std::max(max_var, t.pos);
  Program dummy;
  for (int v = 0; v <= max_var; v++) dummy.shared_vars.push_back("v" + std::to_string(v));
  WeakTrace again = weak_trace_from_json(weak_trace_to_json(w, dummy));
  if (!(again == w)) {
    std::cerr << "validate: canonical round trip failed\n";
    return kExitError;
  }
  std::cout << "valid trace: " << w.txns.size() << " transactions, " << w.rf.size()
            << " rf edges\n";
  return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stateless model checker for transactional programs under causal consistency"};
  app.require_subcommand(1);

  CheckOptions opt;
  CLI::App* check = app.add_subcommand("check", "check one program");
  check->add_option("file", opt.file, "program file (.tpl)")->required();
  check->add_option("--model", opt.model, "ccv or cc")->default_val("ccv");
  check->add_option("--unroll", opt.unroll, "loop unrolling bound")->default_val(4);
  check->add_flag("--oracle", opt.oracle, "cross-check against the exhaustive oracle");
  check->add_option("--emit", opt.emit, "emit traces: dot or json")
      ->check(CLI::IsMember({"dot", "json"}));
  check->add_option("--out", opt.out_dir, "output directory for emitted traces");
  check->add_option("--json", opt.json_path, "path for the JSON report");
  check->add_option("--max-traces", opt.max_traces, "trace budget");
  check->add_option("--max-nodes", opt.max_nodes, "node budget");
  check->add_flag("--first", opt.first, "stop at the first violation");

  std::string corpus_dir, expect_file;
  int corpus_unroll = 4;
  CLI::App* corpus = app.add_subcommand("corpus", "run a benchmark directory");
  corpus->add_option("dir", corpus_dir, "benchmark directory")->required();
  corpus->add_option("--expect", expect_file, "expectations file")->required();
  corpus->add_option("--unroll", corpus_unroll, "loop unrolling bound")->default_val(4);

  std::string validate_file;
  CLI::App* validate = app.add_subcommand("validate", "validate an emitted trace");
  validate->add_option("file", validate_file, "trace JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return run_check(opt);
    if (corpus->parsed()) return run_corpus(corpus_dir, expect_file, corpus_unroll);
    if (validate->parsed()) return run_validate(validate_file);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const OracleGuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
