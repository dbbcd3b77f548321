#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const std::string& out_path) {
  std::string cmd = std::string(KTAG_CLI_PATH) + " " + args + " > " + out_path +
                    " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Tmp {
  fs::path dir;
  Tmp() {
    dir = fs::temp_directory_path() / "ktag_cli_test";
    fs::create_directories(dir);
  }
  std::string at(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("exit 0 on a passing run, trace written") {
  Tmp tmp;
  int rc = run_cli("run --protocol fig1 --n 3 --f 1 --inputs 001 --trace " +
                       tmp.at("t.jsonl"),
                   tmp.at("run.out"));
  CHECK(rc == 0);
  CHECK(slurp(tmp.at("run.out")).find("p1=0") != std::string::npos);
  CHECK(!slurp(tmp.at("t.jsonl")).empty());
  CHECK(run_cli("check --trace " + tmp.at("t.jsonl"), tmp.at("chk.out")) == 0);
}

TEST_CASE("exit 64 on precondition violations") {
  Tmp tmp;
  CHECK(run_cli("run --protocol fig2 --n 2 --f 1 --inputs 11",
                tmp.at("o1")) == 64);
  CHECK(run_cli("run --protocol fig1 --n 3 --f 1 --inputs 0011",
                tmp.at("o2")) == 64);  // wrong input width
  CHECK(run_cli("run --protocol fig1 --n 3 --f 1 --inputs 001 --crashes "
                "1@0,2@0",
                tmp.at("o3")) == 64);  // crash budget above f
  CHECK(run_cli("run --protocol nosuch --n 3 --f 1 --inputs 001",
                tmp.at("o4")) == 64);
}

TEST_CASE("exit 2 when the checker finds a failure") {
  Tmp tmp;
  // A hand-built trace with split decisions.
  std::ofstream f(tmp.at("bad.jsonl"), std::ios::binary);
  f << R"({"type":"header","protocol":"trivial","params":{"f":0,"n":2},"n":2,"inputs":"11","crashes":[],"oracles":[],"sched":{"kind":"fair","seed":0},"bound":100,"hit_bound":false})"
    << "\n"
    << R"({"type":"event","t":1,"loc":"local","pid":1,"kind":"D","value":1})"
    << "\n"
    << R"({"type":"event","t":2,"loc":"local","pid":2,"kind":"D","value":0})"
    << "\n";
  f.close();
  CHECK(run_cli("check --trace " + tmp.at("bad.jsonl"), tmp.at("chk.out")) == 2);
}

TEST_CASE("refute exit codes track the demonstration") {
  Tmp tmp;
  CHECK(run_cli("refute --construction ir1 --candidate naive --n 3 --f 1 --k 1",
                tmp.at("r1")) == 0);
  CHECK(run_cli("refute --construction ir3 --candidate fig4 --n 2 --f 1 "
                "--oracle-mode sham",
                tmp.at("r2")) == 0);
  CHECK(slurp(tmp.at("r2")).find("BLOCKED") != std::string::npos);
  // A stalling candidate is inconclusive.
  CHECK(run_cli("refute --construction ir3 --candidate fig2 --n 4 --f 2 "
                "--oracle-mode general --bound 2000",
                tmp.at("r3")) == 3);
}

TEST_CASE("allowed prints the set and sweep prints the table") {
  Tmp tmp;
  CHECK(run_cli("allowed --k 2 --n 3 --inputs 1?0 --faulty 0", tmp.at("a")) == 0);
  CHECK(slurp(tmp.at("a")) == "{0}\n");
  CHECK(run_cli("allowed --problem wag --n 3 --inputs ??? --faulty 0 --k 1",
                tmp.at("b")) == 0);
  CHECK(slurp(tmp.at("b")) == "{}\n");
  CHECK(run_cli("sweep --protocol fig4 --n 2 --f 1 --exhaustive-inputs "
                "--crash-samples 10 --seeds 2 --json",
                tmp.at("s")) == 0);
  CHECK(slurp(tmp.at("s")).find("\"fail\":0") != std::string::npos);
}
