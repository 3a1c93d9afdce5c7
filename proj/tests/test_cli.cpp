#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sst/cli.hpp"
#include "support/fixtures.hpp"

using namespace sst;
using Catch::Matchers::ContainsSubstring;

namespace {

const std::string samples = std::string(SST_SAMPLES) + "/machines.sst";

struct Outcome {
  int code;
  std::string out, err;
};

Outcome sst_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "sst-cli-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Sets an environment variable for the lifetime of the object.
struct EnvVar {
  std::string name;
  EnvVar(std::string n, const std::string& value) : name(std::move(n)) { setenv(name.c_str(), value.c_str(), 1); }
  ~EnvVar() { unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("eval prints every output", "[cli]") {
  auto r = sst_cli({"eval", samples, "T1", "aaa"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out == "ababab\n");
  CHECK(sst_cli({"eval", samples, "T2", "a"}).out.empty());
  CHECK(sst_cli({"eval", samples, "T1", "-"}).out == "-\n");
  CHECK(sst_cli({"eval", samples, "TwoLoops", "aa"}).out == "aa\nab\nba\nbb\n");
  CHECK(sst_cli({"eval", samples, "T2", "a b"}).out == "ab\n");
  CHECK(sst_cli({"eval", samples, "T1", "ab"}).code == cli::exit_usage);
}

TEST_CASE("tokenizing command-line words", "[cli]") {
  CHECK(cli::tokenize_word(fixtures::t2(), "abba") == Text{"a", "b", "b", "a"});
  CHECK(cli::tokenize_word(fixtures::t2(), "") == Text{});
  CHECK(cli::tokenize_word(fixtures::t2(), " b  a ") == Text{"b", "a"});
  Sst long_names = SstBuilder().input({"ab", "a", "b"}).output({"a"}).states({"q"}).build();
  CHECK(cli::tokenize_word(long_names, "aab") == Text{"a", "ab"});
  CHECK_THROWS_AS(cli::tokenize_word(long_names, "ac"), DomainError);
}

TEST_CASE("relation prints tab-separated pairs in length-lex order", "[cli]") {
  auto r = sst_cli({"relation", samples, "T2", "--max-len", "2"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out == "b\tb\nab\tab\nbb\tb\n");
  CHECK(sst_cli({"relation", samples, "T3", "--max-len", "0"}).out.empty());
  CHECK(sst_cli({"relation", samples, "T1", "--max-len", "1"}).out == "-\t-\na\tab\n");
  CHECK(sst_cli({"relation", samples, "T1"}).code == cli::exit_usage);
  CHECK(sst_cli({"--jobs", "3", "relation", samples, "T2", "--max-len", "2"}).out == r.out);
}

TEST_CASE("compose writes the composite machine", "[cli]") {
  auto r = sst_cli({"compose", samples, "T1", "T2"});
  CHECK(r.code == cli::exit_ok);
  CHECK_THAT(r.out, ContainsSubstring("sst T1_T2 {"));
  CHECK(parse(r.out).at("T1_T2") == fixtures::t3());

  auto path = scratch("composite.sst");
  std::filesystem::remove(path);
  r = sst_cli({"compose", samples, "T1", "T2", "--nondet", "-o", path.string(), "--name", "C"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out.empty());
  CHECK(parse(read_file(path)).at("C") == fixtures::t3());

  r = sst_cli({"compose", samples, "Doubling", "T1"});
  CHECK(r.code == cli::exit_usage);
  CHECK_THAT(r.err, ContainsSubstring("not copyless"));
  CHECK(sst_cli({"compose", samples, "T1", "Missing"}).code == cli::exit_usage);
}

TEST_CASE("check reports properties through the exit code", "[cli]") {
  CHECK(sst_cli({"check", "diamond-free", samples, "T3"}).code == cli::exit_ok);
  CHECK(sst_cli({"check", "diamond-free", samples, "T3", "--with-outputs"}).code == cli::exit_ok);

  auto r = sst_cli({"check", "copyless", samples, "T3"});
  CHECK(r.code == cli::exit_false);
  CHECK(r.out == "false\ncopyful transition: r1 -a-> r1 { z1 = z3; z2 = 'a' 'b' z4; z3 = z3; z4 = 'a' 'b' z4; }\n");
  CHECK(sst_cli({"check", "copyless", samples, "T1"}).out == "true\n");

  r = sst_cli({"check", "diamond-free", samples, "Doubling"});
  CHECK(r.code == cli::exit_false);
  CHECK(r.out == "false\nwitness run: q0 -a-> q0\n");

  CHECK(sst_cli({"check", "deterministic", samples, "T2"}).code == cli::exit_ok);
  CHECK(sst_cli({"check", "deterministic", samples, "TwoLoops"}).code == cli::exit_false);
  CHECK(sst_cli({"check", "functional", samples, "TwoLoops", "--max-len", "1"}).code == cli::exit_false);
  CHECK(sst_cli({"check", "functional", samples, "TwoLoops", "--max-len", "0"}).code == cli::exit_ok);
  CHECK(sst_cli({"check", "functional", samples, "T1"}).code == cli::exit_usage);
  CHECK(sst_cli({"check", "bounded", samples, "T1"}).code == cli::exit_usage);
}

TEST_CASE("decompose lists the members of a transition's assignment", "[cli]") {
  auto r = sst_cli({"decompose", samples, "T3", "r1", "a"});
  CHECK(r.code == cli::exit_ok);
  CHECK_THAT(r.out, ContainsSubstring("r1 -a-> r1: 4 members\n"));
  CHECK_THAT(r.out, ContainsSubstring("  { z1 = z3; z2 = 'a' 'b' z4; z3 =; z4 =; }\n"));
  CHECK_THAT(r.out, ContainsSubstring("  { z1 =; z2 =; z3 = z3; z4 = 'a' 'b' z4; }\n"));
  CHECK_THAT(sst_cli({"decompose", samples, "T1", "q0", "a"}).out, ContainsSubstring("1 member\n"));
  r = sst_cli({"decompose", samples, "Doubling", "q0", "a"});
  CHECK(r.code == cli::exit_usage);
  CHECK_THAT(r.err, ContainsSubstring("'x'"));
  CHECK(sst_cli({"decompose", samples, "T3", "r9", "a"}).code == cli::exit_usage);
  CHECK(sst_cli({"decompose", samples, "T2", "p0", "c"}).code == cli::exit_usage);
}

TEST_CASE("to-copyless converts diamond-free machines", "[cli]") {
  auto r = sst_cli({"to-copyless", samples, "T3"});
  CHECK(r.code == cli::exit_ok);
  SstDocument doc = parse(r.out);
  const Sst& m = doc.at("T3_copyless");
  CHECK(is_copyless_sst(m));
  CHECK(m == to_copyless(fixtures::t3()));

  r = sst_cli({"to-copyless", samples, "Doubling"});
  CHECK(r.code == cli::exit_usage);
  CHECK_THAT(r.err, ContainsSubstring("witness run: q0 -a-> q0"));
  CHECK(sst_cli({"to-copyless", samples, "T3", "--dead-reads", "propagate", "--name", "P"}).code == cli::exit_ok);
  CHECK(sst_cli({"to-copyless", samples, "T3", "--dead-reads", "sometimes"}).code == cli::exit_usage);
}

TEST_CASE("pipeline and equiv", "[cli]") {
  auto path = scratch("pipeline.sst");
  auto r = sst_cli({"pipeline", samples, "T1", "T2", "-o", path.string(), "--name", "P"});
  REQUIRE(r.code == cli::exit_ok);
  auto combined = scratch("combined.sst");
  write_file(combined, read_file(samples) + "\n" + read_file(path));
  CHECK(sst_cli({"check", "copyless", combined.string(), "P"}).code == cli::exit_ok);
  r = sst_cli({"equiv", combined.string(), "T3", "P", "--max-len", "8"});
  CHECK(r.code == cli::exit_ok);
  CHECK(r.out == "equivalent up to length 8\n");

  r = sst_cli({"equiv", samples, "T1", "T3", "--max-len", "3"});
  CHECK(r.code == cli::exit_false);
  CHECK(r.out == "inequivalent\n-\t-\tonly T1\n");
  r = sst_cli({"equiv", samples, "T1", "TwoLoops", "--max-len", "3"});
  CHECK(r.code == cli::exit_false);
  CHECK(r.out == "inequivalent\na\tab\tonly T1\na\ta\tonly TwoLoops\na\tb\tonly TwoLoops\n");
  CHECK(sst_cli({"equiv", samples, "T1", "T2", "--max-len", "3"}).code == cli::exit_usage);
}

TEST_CASE("input errors and budgets", "[cli]") {
  CHECK(sst_cli({}).code == cli::exit_usage);
  CHECK(sst_cli({"frobnicate"}).code == cli::exit_usage);
  CHECK(sst_cli({"--help"}).code == cli::exit_ok);
  CHECK(sst_cli({"eval", "/nonexistent/file.sst", "T1", "a"}).code == cli::exit_usage);

  auto broken = scratch("broken.sst");
  write_file(broken, "sst A {\n  input a;\n}\n");
  auto r = sst_cli({"eval", broken.string(), "A", "a"});
  CHECK(r.code == cli::exit_usage);
  CHECK_THAT(r.err, ContainsSubstring("broken.sst:2:9: expected ':'"));

  {
    EnvVar budget("SST_BUDGET", "5");
    r = sst_cli({"relation", samples, "T2", "--max-len", "6"});
    CHECK(r.code == cli::exit_budget);
    CHECK_THAT(r.err, ContainsSubstring("budget"));
    CHECK(sst_cli({"relation", samples, "T2", "--max-len", "1"}).code == cli::exit_ok);
  }
  {
    EnvVar budget("SST_BUDGET", "lots");
    CHECK(sst_cli({"relation", samples, "T2", "--max-len", "1"}).code == cli::exit_usage);
  }
}
