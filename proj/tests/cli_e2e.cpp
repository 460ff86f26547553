// End-to-end checks of the command-line surface: exit codes, report
// determinism, trace emission and validation, and the corpus runner.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
  if (!ok) failures++;
}

int run(const std::string& cmd) {
  int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string strip_millis(std::string s) {
  size_t pos = s.find("\"millis\"");
  if (pos != std::string::npos) {
    size_t end = s.find('\n', pos);
    s.erase(pos, end - pos);
  }
  return s;
}

}  // namespace

int main() {
  const std::string cli = CAUSALMC_CLI_PATH;
  const std::string bench = CAUSALMC_BENCH_DIR;
  fs::path tmp = fs::temp_directory_path() / "causalmc_e2e";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  // exit codes: 0 safe, 1 unsafe, 2 error, 3 budget exceeded
  check(run(cli + " check " + bench + "/message_passing.tpl --model ccv --json " +
            (tmp / "mp.json").string()) == 0,
        "safe program exits 0");
  check(run(cli + " check " + bench + "/lost_update.tpl --model cc --json " +
            (tmp / "lu.json").string()) == 1,
        "unsafe program exits 1");
  {
    std::ofstream bad(tmp / "bad.tpl");
    bad << "var x; process p { transaction { x := ; } }";
  }
  check(run(cli + " check " + (tmp / "bad.tpl").string()) == 2,
        "parse error exits 2");
  check(run(cli + " check " + bench + "/postponed_reads.tpl --max-nodes 3 --json " +
            (tmp / "budget.json").string()) == 3,
        "exhausted budget exits 3");
  check(run(cli + " check " + bench + "/does_not_exist.tpl") == 2,
        "missing file exits 2");

  // byte-identical reports modulo the wall-time field
  std::string j1 = (tmp / "rep1.json").string(), j2 = (tmp / "rep2.json").string();
  run(cli + " check " + bench + "/co_read_atomicity.tpl --model cc --json " + j1);
  run(cli + " check " + bench + "/co_read_atomicity.tpl --model cc --json " + j2);
  check(!slurp(j1).empty() && strip_millis(slurp(j1)) == strip_millis(slurp(j2)),
        "reports are deterministic up to wall time");
  check(slurp(j1).find("\"verdict\": \"UNSAFE\"") != std::string::npos,
        "report carries the verdict");

  // emitted traces validate and are named by their canonical hash
  fs::path out = tmp / "traces";
  check(run(cli + " check " + bench + "/postponed_reads.tpl --emit json --out " +
            out.string() + " --json " + (tmp / "pr.json").string()) == 0,
        "emit json succeeds");
  int emitted = 0;
  bool all_valid = true;
  for (const auto& entry : fs::directory_iterator(out)) {
    emitted++;
    if (run(cli + " validate " + entry.path().string()) != 0) all_valid = false;
  }
  check(emitted == 13, "reference program emits 13 trace files");
  check(all_valid, "every emitted trace validates");

  // dot emission produces one file per trace with the three edge styles
  fs::path dots = tmp / "dots";
  run(cli + " check " + bench + "/message_passing.tpl --emit dot --out " +
      dots.string() + " --json " + (tmp / "mp2.json").string());
  int dot_count = 0;
  bool dot_styled = true;
  for (const auto& entry : fs::directory_iterator(dots)) {
    dot_count++;
    std::string text = slurp(entry.path());
    if (text.find("digraph") == std::string::npos ||
        text.find("style=dashed") == std::string::npos)
      dot_styled = false;
  }
  check(dot_count == 3 && dot_styled, "dot emission writes styled graphs");

  // oracle cross-check flag
  check(run(cli + " check " + bench + "/cross_exchange.tpl --model cc --oracle --json " +
            (tmp / "ce.json").string()) == 1,
        "oracle-checked unsafe run exits 1");

  // corpus runner: green on the shipped expectations, red on a broken one
  check(run(cli + " corpus " + bench + " --expect " + bench + "/expectations.txt") == 0,
        "corpus matches expectations");
  {
    std::ofstream bad(tmp / "bad_expect.txt");
    bad << "message_passing.tpl UNSAFE UNSAFE\n";
  }
  check(run(cli + " corpus " + bench + " --expect " + (tmp / "bad_expect.txt").string()) != 0,
        "corpus flags a wrong expectation");
  {
    std::ofstream missing(tmp / "missing_expect.txt");
    missing << "no_such_file.tpl SAFE SAFE\n";
  }
  check(run(cli + " corpus " + bench + " --expect " +
            (tmp / "missing_expect.txt").string()) == 2,
        "corpus reports a missing benchmark file");

  fs::remove_all(tmp);
  if (failures) {
    std::printf("%d e2e checks FAILED\n", failures);
    return 1;
  }
  std::printf("all cli e2e checks passed\n");
  return 0;
}
