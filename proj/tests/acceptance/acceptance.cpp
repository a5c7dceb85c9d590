// Acceptance suite. Prints one PASS/FAIL line per criterion followed by
// indented detail lines, writes the audit report and separation atlas to the
// artifact directory, and exits non-zero if any criterion fails for a reason
// other than a recorded known deviation.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "conscheck/cli.hpp"
#include "conscheck/hierarchy.hpp"
#include "conscheck/simulator.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/small_histories.hpp"

using namespace conscheck;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome_ {
  bool pass = true;
  bool known_deviation = false;
  std::string summary;
  std::vector<std::string> details;
};

struct Criterion {
  int number;
  std::string title;
  double time_limit_s;
  std::function<Outcome_()> run;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 1) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << x;
  return ss.str();
}

fs::path artifact_dir() {
  if (const char* env = std::getenv("CONSCHECK_ARTIFACT_DIR"); env && *env) return env;
  return CONSCHECK_ARTIFACT_DIR;
}

void write_artifact(const std::string& name, const std::string& text) {
  fs::create_directories(artifact_dir());
  std::ofstream(artifact_dir() / name, std::ios::binary) << text;
}

bool holds(PredicateId p, const AbstractExecution& a) { return evaluate_predicate(p, a).holds; }

bool lib_satisfied(const History& h, const BoundModel& m) {
  return check_history(h, m).outcome == Outcome::Satisfied;
}

// ---------------------------------------------------------------------------

Outcome_ oracle_equivalence() {
  Outcome_ out;
  std::vector<std::pair<oracle::Model, BoundModel>> models;
  for (int i = 0; i < 32; ++i) {
    auto m = static_cast<oracle::Model>(1u << i);
    if (oracle::acceptance_models & m) models.push_back({m, conscheck::bind(oracle::model_key(m))});
  }
  std::size_t histories = 0, disagreements = 0, unknown = 0;
  std::vector<std::size_t> satisfied(models.size(), 0);
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t at_n = 0;
    small_histories::for_each(n, [&](const History& h) {
      ++histories;
      ++at_n;
      const auto want = oracle::satisfied_models(oracle::from_history(h), oracle::acceptance_models);
      for (std::size_t i = 0; i < models.size(); ++i) {
        const auto r = check_history(h, models[i].second);
        if (r.outcome == Outcome::Unknown) ++unknown;
        const bool lib = r.outcome == Outcome::Satisfied;
        const bool ref = (want & models[i].first) != 0;
        satisfied[i] += ref;
        if (lib != ref) {
          if (disagreements++ < 5)
            out.details.push_back("disagreement on " + models[i].second.def.name + " (library " +
                                  (lib ? "Satisfied" : to_string(r.outcome)) + "):\n" + write_history(h));
        }
      }
    });
    out.details.push_back(std::to_string(n) + " operations: " + std::to_string(at_n) + " histories");
  }
  for (std::size_t i = 0; i < models.size(); ++i)
    out.details.push_back(models[i].second.def.name + " satisfied by " + std::to_string(satisfied[i]) + "/" +
                          std::to_string(histories));
  out.pass = disagreements == 0 && unknown == 0;
  out.summary = std::to_string(histories) + " histories x " + std::to_string(models.size()) + " models, " +
                std::to_string(disagreements) + " disagreements, " + std::to_string(unknown) + " unknown";
  return out;
}

// ---------------------------------------------------------------------------

Outcome_ canonical_verdicts() {
  Outcome_ out;
  struct Row {
    const char* label;
    History h;
    std::string model;
    oracle::Model ref;
    bool expect;
  };
  const std::vector<Row> rows = {
      {"H1", fixtures::h1(), "linearizability", oracle::Lin, true},
      {"H2", fixtures::h2(), "linearizability", oracle::Lin, false},
      {"H2", fixtures::h2(), "sequential", oracle::Sequential, true},
      {"H3", fixtures::h3(), "safe", oracle::Safe, true},
      {"H3", fixtures::h3(), "regular", oracle::Regular, false},
      {"H4", fixtures::h4(), "MonotonicReads,RVal", oracle::MonotonicReads, true},
      {"H4", fixtures::h4(), "MonotonicReads,MonotonicWrites,RVal", oracle::MonotonicReadsWrites, false},
      {"H5", fixtures::h5(), "causality", oracle::Causality, true},
      {"H5", fixtures::h5(), "sequential", oracle::Sequential, false},
  };
  std::size_t good = 0;
  for (const auto& r : rows) {
    const auto res = check_history(r.h, r.model);
    const bool lib = res.outcome == Outcome::Satisfied;
    const bool lib_decided = res.outcome != Outcome::Unknown;
    const bool ref = oracle::satisfies(r.h, r.ref);
    bool witness_ok = true;
    if (lib && res.witness) witness_ok = validate_witness(*res.witness, conscheck::bind(r.model));
    const bool ok = lib_decided && lib == r.expect && ref == r.expect && witness_ok;
    good += ok;
    out.details.push_back(std::string(ok ? "ok   " : "BAD  ") + r.label + " " + r.model + ": library " +
                          to_string(res.outcome) + ", oracle " + (ref ? "Satisfied" : "Violated") +
                          ", expected " + (r.expect ? "Satisfied" : "Violated"));
  }
  out.pass = good == rows.size();
  out.summary = std::to_string(good) + "/" + std::to_string(rows.size()) + " verdicts match and oracle-confirmed";
  return out;
}

// ---------------------------------------------------------------------------

Outcome_ conjunct_implications() {
  using P = PredicateId;
  Outcome_ out;
  struct Rule {
    std::string name;
    std::function<bool(const AbstractExecution&)> antecedent;
    P consequent;
    std::size_t fired = 0, broken = 0;
  };
  auto one = [](P p) { return [p](const AbstractExecution& a) { return holds(p, a); }; };
  std::vector<Rule> rules = {
      {"RealTime => RealTimeWrites", one(P::RealTime), P::RealTimeWrites},
      {"RealTimeWrites => RealTimeWW", one(P::RealTimeWrites), P::RealTimeWW},
      {"RVal => SeqRVal", one(P::RVal), P::SeqRVal},
      {"CausalVisibility => PRAM", one(P::CausalVisibility), P::PRAM},
      {"CausalVisibility => PerObjectPRAM", one(P::CausalVisibility), P::PerObjectPRAM},
      {"CausalVisibility => MonotonicReads", one(P::CausalVisibility), P::MonotonicReads},
      {"CausalVisibility => ReadYourWrites", one(P::CausalVisibility), P::ReadYourWrites},
      {"CausalArbitration => MonotonicWrites", one(P::CausalArbitration), P::MonotonicWrites},
      {"CausalArbitration => WritesFollowReads", one(P::CausalArbitration), P::WritesFollowReads},
      {"SingleOrder & PRAM => MonotonicWrites",
       [](const AbstractExecution& a) { return holds(P::SingleOrder, a) && holds(P::PRAM, a); },
       P::MonotonicWrites},
  };
  const std::size_t samples = 100'000;
  const std::uint64_t seed0 = 0x5eed0000;
  const char* biases[] = {"", "causality", "sequential", "linearizability", "pram"};
  for (std::uint64_t s = 0; s < samples; ++s) {
    GeneratorConfig cfg;
    cfg.ops = 2 + s % 6;
    cfg.procs = 1 + s % 3;
    cfg.objects = 1 + (s / 3) % 2;
    cfg.pending_ratio = (s % 4 == 0) ? 0.4 : 0.0;
    cfg.vis_density = 0.2 + 0.2 * static_cast<double>(s % 4);
    const char* bias = biases[s % 5];
    auto a = *bias ? random_abstract_execution(cfg, seed0 + s, conscheck::bind(bias))
                   : random_abstract_execution(cfg, seed0 + s);
    for (auto& r : rules) {
      if (!r.antecedent(a)) continue;
      ++r.fired;
      if (!holds(r.consequent, a) && r.broken++ == 0)
        out.details.push_back("counterexample to " + r.name + ":\n" + execution_to_json(a).dump());
    }
  }
  std::size_t broken = 0;
  for (const auto& r : rules) {
    broken += r.broken;
    out.details.push_back(r.name + ": antecedent held " + std::to_string(r.fired) + " times, " +
                          std::to_string(r.broken) + " violations");
    if (r.fired == 0) out.pass = false;
  }
  out.pass = out.pass && broken == 0;
  out.summary = std::to_string(samples) + " executions, " + std::to_string(rules.size()) + " implications, " +
                std::to_string(broken) + " violations";
  return out;
}

// ---------------------------------------------------------------------------

std::vector<EdgeReport> g_audit;  // reused by the determinism check

Outcome_ hierarchy_audit() {
  Outcome_ out;
  const auto g = model_graph();
  const std::size_t samples = 10'000;
  const std::uint64_t seed = 0;
  g_audit = audit_graph(g, samples, seed, {}, 0);

  ojson report = ojson::array();
  for (const auto& r : g_audit) report.push_back(edge_report_to_json(r));
  write_artifact("audit.json", report.dump(2) + "\n");
  write_artifact("hierarchy.dot", graph_to_dot(g, g_audit));

  std::size_t unclassified = 0, unreplayable = 0;
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& r : g_audit) {
    ++counts[static_cast<int>(r.edge.status)];
    if (r.edge.status == EdgeStatus::unaudited) ++unclassified;
    if (r.edge.status == EdgeStatus::audited_pass && r.samples != samples) ++unclassified;
    if (r.edge.status == EdgeStatus::refuted && !replay_counterexample(r)) ++unreplayable;
    if (r.edge.status == EdgeStatus::refuted)
      out.details.push_back("refuted " + r.edge.strong.label() + " -> " + r.edge.weak.label() +
                            " (counterexample at sample " + std::to_string(r.counterexample_sample.value_or(0)) + ")");
  }
  out.details.push_back(std::to_string(g_audit.size()) + " edges: " + std::to_string(counts[0]) +
                        " proven-conjunct, " + std::to_string(counts[1]) + " audited-pass, " +
                        std::to_string(counts[2]) + " refuted, " + std::to_string(counts[3]) + " unaudited");

  auto status_of = [&](const std::string& strong, const std::string& weak) -> const EdgeReport* {
    for (const auto& r : g_audit)
      if (r.edge.strong.name == strong && r.edge.weak.name == weak) return &r;
    return nullptr;
  };
  const std::vector<std::pair<std::string, std::string>> required = {
      {"linearizability", "sequential"},
      {"sequential", "pram"},
      {"linearizability", "regular"},
      {"regular", "safe"},
      {"causality", "monotonic-reads"},
      {"causality", "read-your-writes"},
      {"causality", "monotonic-writes"},
      {"causality", "writes-follow-reads"},
      {"causality", "pram"},
      {"causal+", "causality"},
      {"linearizability", "timed-linearizability"},
      {"timed-linearizability", "linearizability"},
  };
  std::vector<std::string> failed_chains;
  for (const auto& [strong, weak] : required) {
    const auto* r = status_of(strong, weak);
    const bool ok = r && r->pass;
    if (!ok) failed_chains.push_back(strong + " -> " + weak);
    out.details.push_back(std::string(ok ? "ok   " : "FAIL ") + "required " + strong + " -> " + weak + ": " +
                          (r ? to_string(r->edge.status) : "missing"));
  }
  const bool only_known = failed_chains == std::vector<std::string>{"timed-linearizability -> linearizability"};
  out.pass = unclassified == 0 && unreplayable == 0 && failed_chains.empty();
  out.known_deviation = !out.pass && unclassified == 0 && unreplayable == 0 && only_known;
  if (out.known_deviation) {
    const auto* r = status_of("timed-linearizability", "linearizability");
    out.details.push_back(
        "known deviation: timed visibility only obliges a completed write to be visible to operations that "
        "start after it returned. Nothing forces the arbitration order to follow real time from an operation "
        "to a write invoked later (for example a read that returns a value written after it), so "
        "timed-linearizability(delta=0) does not imply linearizability. Counterexample:");
    if (r && r->counterexample) out.details.push_back(r->counterexample->dump());
  }
  out.summary = std::to_string(g_audit.size()) + " edges classified, " + std::to_string(unreplayable) +
                " unreplayable refutations, " + std::to_string(failed_chains.size()) +
                " required chains failing; report in " + (artifact_dir() / "audit.json").string();
  return out;
}

// ---------------------------------------------------------------------------

Outcome_ separation_atlas() {
  Outcome_ out;
  struct Pair {
    std::string weak, strong;
    oracle::Model weak_ref, strong_ref;
    oracle::Params params;
  };
  auto k2 = audit_point("k-linearizability");
  k2.params.k_versions = 2;
  const std::vector<Pair> pairs = {
      {"sequential", "linearizability", oracle::Sequential, oracle::Lin, {}},
      {"causality", "sequential", oracle::Causality, oracle::Sequential, {}},
      {"pram", "causality", oracle::Pram, oracle::Causality, {}},
      {"safe", "regular", oracle::Safe, oracle::Regular, {}},
      {"prefix-sequential", "sequential", oracle::PrefixSequential, oracle::Sequential, {}},
      {"k-linearizability", "linearizability", oracle::KLinearizability, oracle::Lin, oracle::Params{2, 0}},
  };
  std::size_t good = 0;
  std::string atlas;
  for (const auto& p : pairs) {
    auto weak = audit_point(p.weak);
    if (p.weak == "k-linearizability") weak = k2;
    const auto strong = audit_point(p.strong);
    const auto sep = find_separation(weak, strong, 200'000, 0, 6);
    if (!sep) {
      out.details.push_back("FAIL " + weak.label() + " / " + strong.label() + ": none found");
      continue;
    }
    const auto& h = sep->history;
    const bool small = h.size() <= 6;
    const bool lib = lib_satisfied(h, weak.bound()) &&
                     check_history(h, strong.bound()).outcome == Outcome::Violated;
    const bool oracle_ok = h.size() <= 5 && oracle::satisfies(h, p.weak_ref, p.params) &&
                           !oracle::satisfies(h, p.strong_ref, p.params);
    const bool ok = small && lib && oracle_ok && sep->cross_checked;
    good += ok;
    out.details.push_back(std::string(ok ? "ok   " : "FAIL ") + weak.label() + " / " + strong.label() + ": " +
                          std::to_string(h.size()) + " operations, attempt " + std::to_string(sep->attempt) +
                          (oracle_ok ? ", oracle-confirmed" : ", oracle disagrees"));
    atlas += write_history(h, {"weak " + weak.label() + ", strong " + strong.label()});
  }
  write_artifact("separations.jsonl", atlas);
  out.pass = good == pairs.size();
  out.summary = std::to_string(good) + "/" + std::to_string(pairs.size()) + " separating histories found and confirmed";
  return out;
}

// ---------------------------------------------------------------------------

Outcome_ simulator_contracts() {
  Outcome_ out;
  const std::size_t runs = 1000;
  auto workload = [](std::uint64_t s) {
    GeneratorConfig cfg;
    cfg.ops = 1 + s % 8;
    cfg.procs = 2 + s % 2;
    cfg.objects = 1 + (s / 2) % 2;
    cfg.read_ratio = 0.5;
    return cfg;
  };
  struct Tally {
    std::size_t contract = 0, seq_violated = 0, lin_violated = 0;
  };
  auto run_mode = [&](StoreMode mode, std::uint64_t max_delay, auto&& body) {
    StoreConfig store;
    store.mode = mode;
    store.max_delay = max_delay;
    for (std::uint64_t s = 0; s < runs; ++s) body(simulate(store, workload(s), s), s);
  };
  auto verdict = [](const History& h, const BoundModel& m) { return check_history(h, m).outcome; };
  bool ok = true;

  Tally lin;
  run_mode(StoreMode::linearizable, 6, [&](const SimulationResult& r, std::uint64_t) {
    lin.contract += verdict(r.history, conscheck::bind("linearizability")) == Outcome::Satisfied;
  });
  ok = ok && lin.contract == runs;
  out.details.push_back("linearizable: " + std::to_string(lin.contract) + "/" + std::to_string(runs) +
                        " linearizability-satisfied (need all)");

  Tally seq;
  run_mode(StoreMode::sequential, 6, [&](const SimulationResult& r, std::uint64_t) {
    seq.contract += verdict(r.history, conscheck::bind("sequential")) == Outcome::Satisfied;
  });
  ok = ok && seq.contract == runs;
  out.details.push_back("sequential: " + std::to_string(seq.contract) + "/" + std::to_string(runs) +
                        " sequential-satisfied (need all)");

  Tally causal;
  run_mode(StoreMode::causal, 6, [&](const SimulationResult& r, std::uint64_t) {
    causal.contract += verdict(r.history, conscheck::bind("causality")) == Outcome::Satisfied;
    causal.seq_violated += verdict(r.history, conscheck::bind("sequential")) == Outcome::Violated;
  });
  ok = ok && causal.contract == runs && causal.seq_violated >= 1;
  out.details.push_back("causal: " + std::to_string(causal.contract) + "/" + std::to_string(runs) +
                        " causality-satisfied (need all), " + std::to_string(causal.seq_violated) +
                        " sequential-violated (need >= 1)");

  Tally ev;
  run_mode(StoreMode::eventual, 8, [&](const SimulationResult& r, std::uint64_t) {
    ModelParams p;
    p.ev_slack = r.visibility_lag;
    ev.contract += verdict(r.history, conscheck::bind("strong-eventual-consistency", p)) == Outcome::Satisfied;
    ev.lin_violated += verdict(r.history, conscheck::bind("linearizability")) == Outcome::Violated;
  });
  ok = ok && ev.contract == runs && ev.lin_violated >= 1;
  out.details.push_back("eventual (max delay 8): " + std::to_string(ev.contract) + "/" + std::to_string(runs) +
                        " strong-eventual-consistency-satisfied, slack = observed lag (need all), " +
                        std::to_string(ev.lin_violated) + " linearizability-violated (need >= 1)");

  Tally pram;
  run_mode(StoreMode::pram, 6, [&](const SimulationResult& r, std::uint64_t) {
    pram.contract += verdict(r.history, conscheck::bind("pram")) == Outcome::Satisfied;
  });
  ok = ok && pram.contract == runs;
  out.details.push_back("pram: " + std::to_string(pram.contract) + "/" + std::to_string(runs) +
                        " pram-satisfied (need all)");

  out.pass = ok;
  out.summary = std::to_string(runs) + " seeded runs per mode, all contracts " + (ok ? "met" : "NOT met");
  return out;
}

// ---------------------------------------------------------------------------

Outcome_ determinism() {
  Outcome_ out;
  const std::string samples = CONSCHECK_SAMPLES_DIR;
  const auto tmp = fs::temp_directory_path() / "conscheck-acceptance";
  fs::create_directories(tmp);
  std::vector<std::vector<std::string>> commands;
  for (const char* f : {"h1_linearizable", "h2_stale_read", "h3_concurrent_garbage", "h4_reordered_writes",
                        "h5_crossing_writes", "pending_write"})
    for (const char* m : {"linearizability", "sequential", "causality", "pram", "regular", "fork-sequential"})
      commands.push_back({"--format", "machine", "check", "--model", m, "--input", samples + "/" + f + ".jsonl"});
  commands.push_back({"--format", "machine", "check", "--model", "pram", "--rdt", "counter", "--input",
                      samples + "/counter_lost_increment.jsonl"});
  commands.push_back({"--format", "machine", "models"});
  commands.push_back({"--format", "machine", "audit", "--edge", "pram,causality", "--samples", "2000", "--seed", "7"});
  commands.push_back({"--format", "machine", "audit", "--edge", "linearizability,timed-linearizability", "--samples",
                      "2000", "--seed", "7"});
  commands.push_back({"--format", "machine", "separate", "--weak", "causality", "--strong", "sequential", "--seed", "3"});
  for (const char* mode : {"linearizable", "sequential", "causal", "eventual", "pram"})
    commands.push_back({"--format", "machine", "simulate", "--mode", mode, "--ops", "8", "--seed", "11"});
  commands.push_back({"--format", "machine", "shrink", "--model", "sequential", "--input",
                      samples + "/h5_crossing_writes.jsonl"});

  std::size_t identical = 0;
  for (const auto& c : commands) {
    const auto a = run_cli(c);
    const auto b = run_cli(c);
    const bool same = a.status == b.status && a.out == b.out && a.err == b.err && !a.out.empty();
    identical += same;
    if (!same) {
      std::string line;
      for (const auto& s : c) line += s + " ";
      out.details.push_back("differs: " + line);
    }
  }

  // The full audit is repeated with a different worker count.
  const auto again = audit_graph(model_graph(), 10'000, 0, {}, 2);
  bool audit_same = again.size() == g_audit.size();
  for (std::size_t i = 0; audit_same && i < again.size(); ++i)
    audit_same = edge_report_to_json(again[i]).dump() == edge_report_to_json(g_audit[i]).dump();
  out.details.push_back(std::string("full audit repeated: ") + (audit_same ? "identical" : "DIFFERS"));

  out.pass = identical == commands.size() && audit_same;
  out.summary = std::to_string(identical) + "/" + std::to_string(commands.size()) +
                " seeded commands byte-identical on repeat" + (audit_same ? ", full audit identical" : "");
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence on all histories up to 4 operations", 900, oracle_equivalence},
      {2, "canonical verdicts H1-H5", 60, canonical_verdicts},
      {3, "fixed-execution conjunct implications", 300, conjunct_implications},
      {4, "hierarchy audit", 600, hierarchy_audit},
      {5, "separation atlas", 600, separation_atlas},
      {6, "simulator contracts", 600, simulator_contracts},
      {7, "determinism of seeded commands", 600, determinism},
  };
  int hard_failures = 0, known = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome_ o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double took = seconds_since(t0);
    const bool in_time = took <= c.time_limit_s;
    const bool pass = o.pass && in_time;
    const char* tag = pass ? "PASS" : (o.known_deviation && in_time ? "FAIL (known deviation)" : "FAIL");
    std::printf("[%s] %d %s: %s (%ss, limit %.0fs)\n", tag, c.number, c.title.c_str(), o.summary.c_str(),
                fmt(took).c_str(), c.time_limit_s);
    for (const auto& d : o.details) std::printf("       %s\n", d.c_str());
    std::fflush(stdout);
    if (!pass) (o.known_deviation && in_time ? known : hard_failures)++;
  }
  std::printf("%d hard failures, %d known deviations\n", hard_failures, known);
  return hard_failures == 0 ? 0 : 1;
}
