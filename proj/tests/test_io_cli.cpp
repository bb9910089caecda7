#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"
#include "oracle_helpers.hpp"
#include "tailbite/construct.hpp"
#include "tailbite/dot.hpp"
#include "tailbite/io.hpp"

using namespace tailbite;
using nlohmann::json;

namespace {

std::string file_contents(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int status = -1;
  std::string out;  // stdout and stderr merged
};

std::string sh_quote(const std::string& s) { return "'" + s + "'"; }

// Run the installed command-line tool (path from TAILBITE_CLI) through the
// shell, optionally with an environment prefix such as "TAILBITE_CAP=2".
CliResult run_cli(const std::vector<std::string>& args, const std::string& env = "") {
  const char* exe = std::getenv("TAILBITE_CLI");
  REQUIRE(exe != nullptr);
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += sh_quote(exe);
  for (const std::string& a : args) cmd += " " + sh_quote(a);
  cmd += " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string fixture_path(const std::string& name) { return oracle::data_dir() + "/" + name; }

}  // namespace

// ---------------------------------------------------------------- text formats

TEST_CASE("code files round-trip exactly", "[io]") {
  for (const char* name : {"bcjr3.code", "kv4.code", "kv5.code", "kv6.code"}) {
    std::string text = file_contents(fixture_path(name));
    LinearCode C = parse_code(text);
    CHECK(emit_code(C) == text);
    // a second pass is a fixed point
    CHECK(emit_code(parse_code(emit_code(C))) == emit_code(C));
  }
}

TEST_CASE("code file parsing accepts comments and rejects malformed input", "[io]") {
  CHECK(parse_code("# comment\nq 2\nn 2\nk 1\nG\n1 1 # trailing\n").generator().row(0).entries() ==
        std::vector<int>{1, 1});

  CHECK_THROWS_AS(parse_code("n 2\nk 1\nG\n1 1\n"), std::invalid_argument);      // missing q
  CHECK_THROWS_AS(parse_code("q 2\nn 2\nk 1\nG\n1\n"), std::invalid_argument);   // truncated row
  CHECK_THROWS_AS(parse_code("q 2\nn 2\nk 1\nG\n1 2\n"), std::invalid_argument); // entry >= q
  CHECK_THROWS_AS(parse_code("q 2\nn 2\nk 1\nG\n1 1\n0\n"), std::invalid_argument);  // trailing
  CHECK_THROWS_AS(parse_code("q x\nn 2\nk 1\nG\n1 1\n"), std::invalid_argument); // bad number
  CHECK_THROWS_AS(parse_code("q 4\nn 2\nk 1\nG\n1 1\n"), std::invalid_argument); // non-prime
  CHECK_THROWS_AS(parse_code("q 2\nn 2\nk 2\nG\n1 1\n1 1\n"), std::invalid_argument);  // rank
}

TEST_CASE("span lists parse and emit", "[io]") {
  std::vector<CircularInterval> spans = parse_spans("(1,3],(3,0],(2,1]", 5);
  REQUIRE(spans.size() == 3);
  CHECK(spans[0] == CircularInterval(1, 3, 5));
  CHECK(spans[1] == CircularInterval(3, 0, 5));
  CHECK(spans[2] == CircularInterval(2, 1, 5));
  CHECK(emit_spans(spans) == "(1,3],(3,0],(2,1]");
  CHECK(emit_span(spans[1]) == "(3,0]");

  // whitespace is free between tokens
  CHECK(parse_spans(" ( 1 , 3 ] , ( 3 , 0 ] ", 5) ==
        std::vector<CircularInterval>{CircularInterval(1, 3, 5), CircularInterval(3, 0, 5)});

  CHECK_THROWS_AS(parse_spans("1,3]", 5), std::invalid_argument);        // missing '('
  CHECK_THROWS_AS(parse_spans("(1,3)", 5), std::invalid_argument);       // wrong bracket
  CHECK_THROWS_AS(parse_spans("(5,0]", 5), std::invalid_argument);       // index out of range
  CHECK_THROWS_AS(parse_spans("(1,3] (3,0]", 5), std::invalid_argument); // missing comma
  CHECK_THROWS_AS(parse_spans("", 5), std::invalid_argument);
}

TEST_CASE("inline matrices parse", "[io]") {
  PrimeField f3{3};
  FpMatrix m = parse_matrix(f3, "1 0 2; 0 1 1");
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 3);
  CHECK(m.row(0).entries() == std::vector<int>{1, 0, 2});
  CHECK(m.row(1).entries() == std::vector<int>{0, 1, 1});

  PrimeField f2{2};
  CHECK(parse_matrix(f2, "0;1").rows() == 2);  // column vector
  CHECK_THROWS_AS(parse_matrix(f2, "2 0"), std::invalid_argument);    // out of range
  CHECK_THROWS_AS(parse_matrix(f2, "1 0; 1"), std::invalid_argument); // ragged
  CHECK_THROWS_AS(parse_matrix(f2, ""), std::invalid_argument);       // empty
}

// ------------------------------------------------------------------ dot export

TEST_CASE("dot export is deterministic and matches a worked example", "[dot]") {
  PrimeField f2{2};
  MatrixTrellis t = elementary_trellis(FpVector(f2, {1, 1}), CircularInterval(0, 1, 2));
  std::string dot = export_dot(expand(t).trellis);
  std::string expected =
      "digraph trellis {\n"
      "  rankdir=LR;\n"
      "  node [shape=circle fontsize=10];\n"
      "  { rank=same; t0_0; }\n"
      "  { rank=same; t1_0; t1_1; }\n"
      "  { rank=same; t2_0; }\n"
      "  t0_0 -> t1_0 [style=dashed];\n"
      "  t0_0 -> t1_1 [style=solid];\n"
      "  t1_0 -> t2_0 [style=dashed];\n"
      "  t1_1 -> t2_0 [style=solid];\n"
      "}\n";
  CHECK(dot == expected);
  // rebuilding from scratch reproduces the bytes
  MatrixTrellis t2 = elementary_trellis(FpVector(f2, {1, 1}), CircularInterval(0, 1, 2));
  CHECK(export_dot(expand(t2).trellis) == dot);
}

TEST_CASE("dot export prints labels over non-binary fields", "[dot]") {
  PrimeField f3{3};
  MatrixTrellis t = elementary_trellis(FpVector(f3, {1, 2}), CircularInterval(0, 1, 2));
  std::string dot = export_dot(expand(t).trellis);
  CHECK(dot.find("[label=\"2\"]") != std::string::npos);
  CHECK(dot.find("style=") == std::string::npos);
}

TEST_CASE("dot export respects the size cap", "[dot]") {
  auto C = oracle::load_fixture("kv5.code");
  MatrixTrellis t = product_trellis(
      C.generator(), {CircularInterval(1, 3, 5), CircularInterval(3, 0, 5), CircularInterval(2, 1, 5)});
  Caps tight;
  tight.scan = 3;
  CHECK_THROWS_AS(export_dot(expand(t).trellis, tight), CapExceeded);
}

// ------------------------------------------------------------------- CLI: codes

TEST_CASE("cli: code info reports the code", "[cli]") {
  CliResult r = run_cli({"code", "info", fixture_path("kv4.code"), "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["q"] == 2);
  CHECK(j["n"] == 4);
  CHECK(j["k"] == 2);
  CHECK(j["full_support"] == true);
  CHECK(j["generator"] == json::parse("[[1,1,0,0],[0,1,1,1]]"));
  CHECK(j["codewords"].size() == 4);
}

TEST_CASE("cli: code emit is canonical", "[cli]") {
  CliResult r = run_cli({"code", "emit", fixture_path("kv4.code")});
  REQUIRE(r.status == 0);
  CHECK(r.out == file_contents(fixture_path("kv4.code")));
}

TEST_CASE("cli: code dual emits the dual code", "[cli]") {
  CliResult r = run_cli({"code", "dual", fixture_path("bcjr3.code")});
  REQUIRE(r.status == 0);
  LinearCode D = parse_code(r.out);
  CHECK(D.dimension() == 1);
  CHECK(D.generator().row(0).entries() == std::vector<int>{1, 1, 1});
}

// --------------------------------------------------------------- CLI: charpair

TEST_CASE("cli: charpair compute prints the pair", "[cli]") {
  CliResult r = run_cli({"charpair", "compute", fixture_path("kv4.code"), "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["spans"] == json::parse(R"(["(0,1]","(1,3]","(2,0]","(3,2]"])"));
  CHECK(j["X"] == json::parse("[[1,1,0,0],[0,1,1,1],[1,0,1,1],[0,1,1,1]]"));
  CHECK(j["span_matrix"] == json::parse("[[0,1,0,0],[0,0,1,1],[1,0,0,1],[1,1,1,0]]"));
  CHECK(j["lex_fallback"] == false);
}

TEST_CASE("cli: charpair enumerate counts the matrices", "[cli]") {
  CliResult r = run_cli({"charpair", "enumerate", fixture_path("kv4.code"), "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["count"] == 2);
  CHECK(j["truncated"] == false);
  CHECK(j["matrices"].size() == 2);
}

TEST_CASE("cli: charpair dualspans confirms span reversal", "[cli]") {
  CliResult r = run_cli({"charpair", "dualspans", fixture_path("kv4.code"), "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["consistent"] == true);
}

// ---------------------------------------------------------------- CLI: trellis

TEST_CASE("cli: trellis bcjr prints matrices and profiles", "[cli]") {
  CliResult r = run_cli(
      {"trellis", "bcjr", fixture_path("bcjr3.code"), "--spans", "(0,2],(1,0]", "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["scp"] == json::parse("[1,1,1]"));
  CHECK(j["ecp"] == json::parse("[2,2,2]"));
  CHECK(j["displacement"] == json::parse("[[0],[1]]"));
  CHECK(j["parity"] == json::parse("[[1,1,1]]"));
  CHECK(j["spans"] == json::parse(R"(["(0,2]","(1,0]"])"));
}

TEST_CASE("cli: property checks drive the exit code", "[cli]") {
  // the recursion trellis identifies cycles with distinct labels: violated -> 1
  CliResult bad = run_cli({"trellis", "bcjr", fixture_path("bcjr3.code"), "--spans",
                           "(0,2],(1,0]", "--check", "one-to-one"});
  CHECK(bad.status == 1);
  CHECK(bad.out.find("violated") != std::string::npos);

  CliResult good = run_cli({"trellis", "product", fixture_path("bcjr3.code"), "--spans",
                            "(0,2],(1,0]", "--check", "one-to-one"});
  CHECK(good.status == 0);
  CHECK(good.out.find("holds") != std::string::npos);

  CliResult merge = run_cli({"trellis", "bcjr", fixture_path("bcjr3.code"), "--spans",
                             "(0,2],(1,0]", "--check", "non-mergeable", "--json"});
  CHECK(merge.status == 0);
  CHECK(json::parse(merge.out)["holds"] == true);

  CliResult dominated = run_cli({"trellis", "bcjr", fixture_path("bcjr3.code"), "--spans",
                                 "(0,2],(1,0]", "--check", "minimal", "--json"});
  CHECK(dominated.status == 1);
  CHECK(json::parse(dominated.out)["holds"] == false);
}

TEST_CASE("cli: kv trellis from a characteristic selection", "[cli]") {
  CliResult r =
      run_cli({"trellis", "kv", fixture_path("kv4.code"), "--select", "2,3", "--json"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["scp"] == json::parse("[2,1,1,1]"));

  // in the other characteristic matrix those two rows are dependent
  CliResult dep =
      run_cli({"trellis", "kv", fixture_path("kv4.code"), "--select", "2,3", "--matrix", "1"});
  CHECK(dep.status == 2);
  CHECK(dep.out.find("dependent") != std::string::npos);
}

TEST_CASE("cli: trellis compare decides isomorphism", "[cli]") {
  std::string code = fixture_path("bcjr3.code");
  CliResult no = run_cli({"trellis", "compare", "--code-a", code, "--kind-a", "product",
                          "--spans-a", "(0,2],(1,0]", "--code-b", code, "--kind-b", "bcjr",
                          "--spans-b", "(0,2],(1,0]", "--json"});
  CHECK(no.status == 1);
  CHECK(json::parse(no.out)["isomorphic"] == "no");

  CliResult yes = run_cli({"trellis", "compare", "--code-a", code, "--kind-a", "bcjr",
                           "--spans-a", "(0,2],(1,0]", "--code-b", code, "--kind-b", "bcjr",
                           "--spans-b", "(0,2],(1,0]"});
  CHECK(yes.status == 0);
  CHECK(yes.out.find("isomorphic: yes") != std::string::npos);
}

TEST_CASE("cli: trellis shift keeps the shifted code", "[cli]") {
  CliResult r = run_cli({"trellis", "shift", "--kind", "bcjr", fixture_path("bcjr3.code"),
                         "--spans", "(0,2],(1,0]", "--by", "2", "--json"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["label_code_is_shifted_code"] == true);

  // a code that is not shift-invariant exercises the direction of the check
  CliResult skew = run_cli({"trellis", "shift", "--kind", "product", fixture_path("kv4.code"),
                            "--by", "1", "--json"});
  REQUIRE(skew.status == 0);
  CHECK(json::parse(skew.out)["label_code_is_shifted_code"] == true);
}

TEST_CASE("cli: quotient-merge folds the product onto the recursion trellis", "[cli]") {
  CliResult r = run_cli({"trellis", "quotient-merge", fixture_path("bcjr3.code"), "--spans",
                         "(0,2],(1,0]", "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["psi_verified"] == true);
  CHECK(j["graph_isomorphic"] == "yes");
}

TEST_CASE("cli: export-dot output is stable", "[cli]") {
  std::vector<std::string> args = {"trellis", "export-dot", "--kind", "bcjr",
                                   fixture_path("bcjr3.code"), "--spans", "(0,2],(1,0]"};
  CliResult a = run_cli(args);
  CliResult b = run_cli(args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("digraph trellis {", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') > 6);
}

// ---------------------------------------------------------------- CLI: duality

TEST_CASE("cli: dualize bcjr verifies the dual representation", "[cli]") {
  CliResult r = run_cli({"dualize", "bcjr", fixture_path("kv5.code"), "--spans",
                         "(1,3],(3,0],(2,1]", "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["represents_dual_code"] == true);
  CHECK(j["scp_equals_primal"] == true);
  CHECK(j["scp"] == json::parse("[2,1,1,2,2]"));
}

TEST_CASE("cli: dualize edgespace reports the annihilator profile", "[cli]") {
  CliResult r = run_cli({"dualize", "edgespace", fixture_path("kv5.code"), "--spans",
                         "(1,3],(3,0],(2,1]", "--prune", "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["ecp"] == json::parse("[2,1,2,2,3]"));
  CHECK(j["dimension_formula_holds"] == true);
  CHECK(j["contains_bcjr_dual_edges"] == true);
  CHECK(j["reduced"] == false);
  CHECK(j["pruned"]["removed_vertices"] == 0);
  CHECK(j["pruned"]["removed_edges"] == 4);
}

TEST_CASE("cli: conjecture check mirrors the library verdicts", "[cli]") {
  CliResult choice = run_cli(
      {"conjecture", "check", fixture_path("kv4.code"), "--select", "2,3", "--json"});
  REQUIRE(choice.status == 0);
  json j = json::parse(choice.out);
  CHECK(j["strong"] == false);
  CHECK(j["weak"] == true);
  CHECK(j["dual_matrices"][0]["independent"] == false);
  CHECK(j["dual_matrices"][1]["independent"] == true);
  CHECK(j["dual_matrices"][1]["iso_to_bcjr_dual"] == "yes");

  CliResult strong = run_cli(
      {"conjecture", "check", fixture_path("kv4.code"), "--select", "0,1", "--json"});
  REQUIRE(strong.status == 0);
  CHECK(json::parse(strong.out)["strong"] == true);
}

TEST_CASE("cli: conjecture search sweeps small codes", "[cli]") {
  CliResult r = run_cli({"conjecture", "search", "--max-n", "3", "--json"});
  REQUIRE(r.status == 0);
  json j = json::parse(r.out);
  CHECK(j["counterexamples"] == 0);
  CHECK(j["minimal_iso_failures"] == 0);
  CHECK(j["records"].get<std::size_t>() > 0);
}

TEST_CASE("cli: oracle commands agree with the linear computations", "[cli]") {
  CliResult r = run_cli({"oracle", "labelcode", "--kind", "bcjr", fixture_path("bcjr3.code"),
                         "--spans", "(0,2],(1,0]"});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("matches the linear computation: yes") != std::string::npos);

  CliResult c = run_cli({"oracle", "cycles", "--kind", "bcjr", fixture_path("bcjr3.code"),
                         "--spans", "(0,2],(1,0]", "--json"});
  REQUIRE(c.status == 0);
  CHECK(json::parse(c.out)["count"] == 8);
}

// -------------------------------------------------------------- CLI: exit codes

TEST_CASE("cli: usage errors exit with 2", "[cli]") {
  CHECK(run_cli({}).status == 2);                                  // no subcommand
  CHECK(run_cli({"frobnicate"}).status == 2);                      // unknown subcommand
  CHECK(run_cli({"trellis", "kv"}).status == 2);                   // missing required argument
  CHECK(run_cli({"code", "info", "/nonexistent.code"}).status == 2);
  CHECK(run_cli({"trellis", "kv", fixture_path("kv4.code"), "--select", "0,9"}).status == 2);
}

TEST_CASE("cli: help exits with 0", "[cli]") {
  CHECK(run_cli({"--help"}).status == 0);
  CHECK(run_cli({"trellis", "--help"}).status == 0);
}

TEST_CASE("cli: enumeration caps exit with 3", "[cli]") {
  CliResult r = run_cli({"charpair", "enumerate", fixture_path("kv4.code")}, "TAILBITE_CAP=2");
  CHECK(r.status == 3);
  CHECK(r.out.find("cap exceeded") != std::string::npos);
}
