#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  std::string out_path = "cli_test_out.txt";
  std::string cmd = std::string(ANDOR_CLI_PATH) + " " + args + " > " + out_path +
                    " 2> cli_test_err.txt";
  int rc = std::system(cmd.c_str());
  int code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  return {code, slurp(out_path)};
}

bool contains_line(const std::string& text, const std::string& line) {
  std::stringstream ss(text);
  std::string cur;
  while (std::getline(ss, cur))
    if (cur == line) return true;
  return false;
}

}  // namespace

TEST_CASE("gen output is byte-identical across invocations and parses") {
  RunResult a = run_cli("gen fig4 --uniform");
  RunResult b = run_cli("gen fig4 --uniform");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("vars 5") != std::string::npos);

  RunResult r1 = run_cli("gen random --n 6 --k 3 --seed 9 --zero-frac 0.3");
  RunResult r2 = run_cli("gen random --n 6 --k 3 --seed 9 --zero-frac 0.3");
  CHECK(r1.exit_code == 0);
  CHECK(r1.out == r2.out);
}

TEST_CASE("stats on fig4 reports width 2 over the documented ordering") {
  CHECK(run_cli("gen fig4 --uniform --out cli_fig4.model").exit_code == 0);
  RunResult s = run_cli("stats --model cli_fig4.model --ordering 3,2,1,0,4");
  CHECK(s.exit_code == 0);
  CHECK(s.out.find("width=2") != std::string::npos);
  CHECK(s.out.find("dfs_tree=1") != std::string::npos);
  CHECK(s.out.find("ctx 4 sep=1,0 and=4") != std::string::npos);
}

TEST_CASE("stats on fig1 lists the dead caches") {
  CHECK(run_cli("gen fig1 --uniform --out cli_fig1.model").exit_code == 0);
  RunResult s = run_cli("stats --model cli_fig1.model --ordering 0,1,4,2,3");
  CHECK(s.exit_code == 0);
  CHECK(s.out.find("dead_caches=1,2,4") != std::string::npos);
  CHECK(s.out.find("depth=3") != std::string::npos);
}

TEST_CASE("solve count on ex34 prints value=1 for each algorithm") {
  CHECK(run_cli("gen ex34 --out cli_ex34.model").exit_code == 0);
  for (const char* algo : {"ve", "ao-df", "ao-bf"}) {
    RunResult s = run_cli(std::string("solve --model cli_ex34.model --task count "
                                      "--ordering 0,1,2,3 --algo ") + algo);
    CHECK(s.exit_code == 0);
    CHECK(contains_line(s.out, "value=1"));
  }
}

TEST_CASE("compare ve and ao-df: incomparable on ex34, identical when positive") {
  RunResult inc = run_cli(
      "compare --model cli_ex34.model --task count --ordering 0,1,2,3 "
      "--algo-a ve --algo-b ao-df");
  CHECK(inc.exit_code == 0);
  CHECK(contains_line(inc.out, "relation=incomparable"));

  CHECK(run_cli("gen random --n 6 --k 2 --seed 5 --out cli_pos.model").exit_code == 0);
  RunResult ident = run_cli(
      "compare --model cli_pos.model --task sum-product --algo-a ve --algo-b ao-df");
  CHECK(ident.exit_code == 0);
  CHECK(contains_line(ident.out, "relation=identical"));
  CHECK(ident.out.find("only_a=0 only_b=0") != std::string::npos);
}

TEST_CASE("solve with dumps writes messages and trace files") {
  RunResult ve = run_cli(
      "solve --model cli_fig1.model --ordering 0,1,4,2,3 --algo ve "
      "--dump-messages cli_msgs.txt");
  CHECK(ve.exit_code == 0);
  std::string msgs = slurp("cli_msgs.txt");
  CHECK(msgs.find("factor 2 1 2") == 0);  // h1(B,C) comes first

  RunResult ao = run_cli(
      "solve --model cli_ex34.model --task count --ordering 0,1,2,3 "
      "--algo ao-df --dump-trace cli_trace.txt");
  CHECK(ao.exit_code == 0);
  std::string trace = slurp("cli_trace.txt");
  CHECK(trace.find("0 - 0 1") == 0);  // root tuple: empty context, A=1
}

TEST_CASE("dot writes a deterministic digraph") {
  RunResult d1 = run_cli(
      "dot --model cli_ex34.model --task count --ordering 0,1,2,3 "
      "--algo ve --out cli_a.dot");
  RunResult d2 = run_cli(
      "dot --model cli_ex34.model --task count --ordering 0,1,2,3 "
      "--algo ve --out cli_b.dot");
  CHECK(d1.exit_code == 0);
  CHECK(d2.exit_code == 0);
  CHECK(slurp("cli_a.dot") == slurp("cli_b.dot"));
  CHECK(slurp("cli_a.dot").find("digraph cm {") == 0);
}

TEST_CASE("exit codes: usage 1, model format 2, size guard 3") {
  CHECK(run_cli("solve --model cli_ex34.model --algo warp").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("solve --model cli_ex34.model --algo ve --ordering 0,1").exit_code == 1);

  std::ofstream bad("cli_bad.model");
  bad << "model bad\nvars 2\ndom 0 2\ndom 1 2\nfactor 2 0 1\n1 2 3\nend\n";
  bad.close();
  CHECK(run_cli("solve --model cli_bad.model --algo ve").exit_code == 2);
  CHECK(run_cli("solve --model cli_missing.model --algo ve").exit_code == 2);

  // deep clique chains push the CM space past the guard
  CHECK(run_cli("gen ex33 --n 33 --out cli_big.model").exit_code == 0);
  CHECK(run_cli("dot --model cli_big.model --out cli_big.dot").exit_code == 3);
}

TEST_CASE("solve over a DFS pseudo tree: gbj stays invisible") {
  CHECK(run_cli("gen random --n 7 --k 3 --seed 12 --zero-frac 0.4 "
                "--out cli_det.model").exit_code == 0);
  RunResult plain = run_cli(
      "solve --model cli_det.model --task count --algo ao-df --tree dfs");
  RunResult gbj = run_cli(
      "solve --model cli_det.model --task count --algo ao-df --tree dfs --gbj");
  CHECK(plain.exit_code == 0);
  CHECK(gbj.exit_code == 0);
  CHECK(plain.out == gbj.out);
}

TEST_CASE("evidence lines flow through solve") {
  std::ofstream f("cli_ev.model");
  f << "model ev\nvars 1\ndom 0 2\nfactor 1 0\n0.4 0.6\nevidence 0 1\nend\n";
  f.close();
  RunResult s = run_cli("solve --model cli_ev.model --algo ve");
  CHECK(s.exit_code == 0);
  CHECK(contains_line(s.out, "value=0.6"));
}
