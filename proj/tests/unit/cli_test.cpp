#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "conscheck/cli.hpp"

using namespace conscheck;
namespace fs = std::filesystem;

namespace {

std::string sample(const std::string& name) { return std::string(CONSCHECK_SAMPLES_DIR) + "/" + name + ".jsonl"; }

CliResult check(const std::string& model, const std::string& file, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{"check", "--model", model, "--input", sample(file)};
  args.insert(args.end(), extra.begin(), extra.end());
  return run_cli(args);
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "conscheck-cli-test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, SampleVerdicts) {
  struct Row {
    const char* file;
    const char* model;
    int status;
  };
  const Row rows[] = {
      {"h1_linearizable", "linearizability", 0},     {"h2_stale_read", "linearizability", 1},
      {"h2_stale_read", "sequential", 0},            {"h3_concurrent_garbage", "safe", 0},
      {"h3_concurrent_garbage", "regular", 1},       {"h4_reordered_writes", "pram", 0},
      {"h4_reordered_writes", "causality", 1},       {"h5_crossing_writes", "causality", 0},
      {"h5_crossing_writes", "sequential", 1},       {"pending_write", "safe", 0},
      {"pending_write", "regular", 1},
  };
  for (const auto& r : rows) EXPECT_EQ(check(r.model, r.file).status, r.status) << r.file << " " << r.model;
  EXPECT_EQ(check("pram", "counter_lost_increment", {"--rdt", "counter"}).status, 0);
  EXPECT_EQ(check("linearizability", "counter_lost_increment", {"--rdt", "counter"}).status, 1);
}

TEST(Cli, ShortNamesAndConjunctions) {
  EXPECT_EQ(check("lin", "h1_linearizable").status, 0);
  EXPECT_EQ(check("SingleOrder,RealTime,RVal", "h2_stale_read").status, 1);
}

TEST(Cli, ModelsListsDefinitions) {
  auto r = run_cli({"models"});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("linearizability = SingleOrder ∧ RealTime ∧ RVal"), std::string::npos);
  auto m = run_cli({"--format", "machine", "models"});
  auto first = ojson::parse(m.out.substr(0, m.out.find('\n')));
  EXPECT_TRUE(first.contains("predicates"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).status, exit_code::usage);
  EXPECT_EQ(run_cli({"check", "--model", "linearizability"}).status, exit_code::usage);
  EXPECT_EQ(check("strict-serializability", "h1_linearizable").status, exit_code::usage);
  EXPECT_EQ(check("timed-linearizability", "h1_linearizable").status, exit_code::usage);
  EXPECT_EQ(run_cli({"simulate", "--mode", "quantum"}).status, exit_code::usage);
}

TEST(Cli, BadInput) {
  auto missing = run_cli({"check", "--model", "sequential", "--input", scratch("nope.jsonl").string()});
  EXPECT_EQ(missing.status, exit_code::bad_input);
  auto bad = scratch("bad.jsonl");
  write(bad,
        "{\"id\":1,\"proc\":\"pa\",\"type\":\"wr\",\"obj\":\"x\",\"ival\":1,\"oval\":\"ok\",\"stime\":0,\"rtime\":1}\n"
        "{\"id\":2,\"proc\":\"pa\",\"type\":\"rd\",\"obj\":\"x\",\"oval\":1,\"stime\":2,\"rtime\":3,\"bad\":0}\n");
  auto r = run_cli({"check", "--model", "sequential", "--input", bad.string()});
  EXPECT_EQ(r.status, exit_code::bad_input);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST(Cli, WitnessIsWrittenAndRevalidated) {
  auto w = scratch("h5.witness.json");
  fs::remove(w);
  ASSERT_EQ(check("causality", "h5_crossing_writes", {"--witness", w.string()}).status, 0);
  ASSERT_TRUE(fs::exists(w));
  EXPECT_EQ(check("causality", "h5_crossing_writes", {"--verify-witness", w.string()}).status, 0);
  EXPECT_EQ(check("sequential", "h5_crossing_writes", {"--verify-witness", w.string()}).status, 1);
  write(w, "{not json");
  EXPECT_EQ(check("causality", "h5_crossing_writes", {"--verify-witness", w.string()}).status,
            exit_code::bad_input);
}

TEST(Cli, MachineOutputIsStable) {
  for (const char* f : {"h1_linearizable", "h2_stale_read", "h5_crossing_writes"}) {
    auto a = check("causality", f, {});
    auto b = run_cli({"--format", "machine", "check", "--model", "causality", "--input", sample(f)});
    auto c = run_cli({"--format", "machine", "check", "--model", "causality", "--input", sample(f)});
    EXPECT_EQ(b.out, c.out);
    auto j = ojson::parse(b.out);
    EXPECT_EQ(j["model"], "causality");
    EXPECT_EQ(b.status, a.status);
  }
}

TEST(Cli, BudgetExhaustionIsUnknown) {
  auto r = check("sequential", "h5_crossing_writes", {"--budget", "1"});
  EXPECT_EQ(r.status, exit_code::unknown);
}

TEST(Cli, AuditSingleEdge) {
  auto dot = scratch("edge.dot");
  auto r = run_cli({"audit", "--edge", "pram,sequential", "--samples", "200", "--dot", dot.string()});
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(fs::exists(dot));
  auto bad = run_cli({"audit", "--edge", "linearizability,timed-linearizability", "--samples", "2000"});
  EXPECT_EQ(bad.status, 1);
  auto m = run_cli({"--format", "machine", "audit", "--edge", "pram,sequential", "--samples", "50"});
  EXPECT_EQ(ojson::parse(m.out).size(), 1u);
  EXPECT_EQ(run_cli({"audit", "--edge", "pram"}).status, exit_code::usage);
}

TEST(Cli, SeparateProducesAParsableHistory) {
  auto r = run_cli({"separate", "--weak", "sequential", "--strong", "linearizability"});
  ASSERT_EQ(r.status, 0);
  auto h = parse_history(r.out).history;
  EXPECT_EQ(check_history(h, "sequential").outcome, Outcome::Satisfied);
  EXPECT_EQ(check_history(h, "linearizability").outcome, Outcome::Violated);
  auto none = run_cli({"separate", "--weak", "sequential", "--strong", "pram", "--budget", "100"});
  EXPECT_EQ(none.status, 1);
}

TEST(Cli, SimulateIsReproducible) {
  std::vector<std::string> args{"simulate", "--mode", "causal", "--ops", "8", "--seed", "4"};
  auto a = run_cli(args);
  auto b = run_cli(args);
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  auto h = parse_history(a.out).history;
  EXPECT_EQ(h.size(), 8u);
  EXPECT_EQ(check_history(h, "causality").outcome, Outcome::Satisfied);
  EXPECT_EQ(run_cli({"simulate", "--mode", "causal", "--min-delay", "5", "--max-delay", "2"}).status,
            exit_code::usage);
}

TEST(Cli, ShrinkKeepsTheViolation) {
  auto r = check("sequential", "h5_crossing_writes");
  ASSERT_EQ(r.status, 1);
  auto s = run_cli({"shrink", "--model", "sequential", "--input", sample("h5_crossing_writes")});
  ASSERT_EQ(s.status, 0);
  auto h = parse_history(s.out).history;
  EXPECT_LE(h.size(), 4u);
  EXPECT_EQ(check_history(h, "sequential").outcome, Outcome::Violated);
  EXPECT_EQ(run_cli({"shrink", "--model", "causality", "--input", sample("h5_crossing_writes")}).status, 1);
}
