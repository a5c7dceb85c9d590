#pragma once
#ifndef CONSCHECK_HIERARCHY_HPP
#define CONSCHECK_HIERARCHY_HPP

#include <algorithm>
#include <cstdint>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "checker.hpp"
#include "generator.hpp"
#include "io.hpp"
#include "models.hpp"

namespace conscheck {

/// A registered model together with the parameters it is compared at.
struct ModelPoint {
  std::string name;
  ModelParams params;

  BoundModel bound() const { return conscheck::bind(name, params); }
  std::string label() const {
    std::string s = name;
    if (params.delta) s += "(delta=" + std::to_string(*params.delta) + ")";
    if (params.k_versions) s += "(k=" + std::to_string(*params.k_versions) + ")";
    return s;
  }
};

/// Comparison point used by the graph: timed models at delta 0, version-bounded
/// models at k 1, slack parameters at their defaults.
inline ModelPoint audit_point(const std::string& name) {
  auto def = require_model(name);
  ModelPoint p{def.name, {}};
  if (def.needs_delta()) p.params.delta = 0;
  if (def.needs_k()) p.params.k_versions = 1;
  return p;
}

enum class EdgeStatus { proven_conjunct, audited_pass, refuted, unaudited };

inline const char* to_string(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::proven_conjunct: return "proven-conjunct";
    case EdgeStatus::audited_pass: return "audited-pass";
    case EdgeStatus::refuted: return "refuted";
    case EdgeStatus::unaudited: return "unaudited";
  }
  return "?";
}

/// "Every execution satisfying `strong` also satisfies `weak`."
struct Edge {
  ModelPoint weak;
  ModelPoint strong;
  EdgeStatus status = EdgeStatus::unaudited;
};

struct ModelGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
};

namespace detail {

struct ImplicationRule {
  std::vector<PredicateId> premises;
  PredicateId conclusion;
};

/// Implications between predicates that hold on every abstract execution.
inline const std::vector<ImplicationRule>& implication_rules() {
  using P = PredicateId;
  static const std::vector<ImplicationRule> rules{
      {{P::RealTime}, P::RealTimeWrites},
      {{P::RealTimeWrites}, P::RealTimeWW},
      {{P::RealTimeWW}, P::MonotonicWrites},
      {{P::RealTime}, P::KRealTimeReads},
      {{P::RealTime}, P::KRealTime},
      {{P::RVal}, P::SeqRVal},
      {{P::CausalVisibility}, P::PRAM},
      {{P::CausalVisibility}, P::PerObjectPRAM},
      {{P::CausalVisibility}, P::MonotonicReads},
      {{P::CausalVisibility}, P::ReadYourWrites},
      {{P::CausalArbitration}, P::MonotonicWrites},
      {{P::CausalArbitration}, P::WritesFollowReads},
      {{P::SingleOrder, P::PRAM}, P::MonotonicWrites},
      {{P::SingleOrder, P::RealTime}, P::PRAM},
      {{P::SingleOrder}, P::PerObjectSingleOrder},
      {{P::PRAM}, P::ReadYourWrites},
      {{P::PRAM}, P::PerObjectPRAM},
  };
  return rules;
}

inline bool parameters_match(PredicateId p, const BoundModel& a, const BoundModel& b) {
  switch (p) {
    case PredicateId::TimedVisibility: return a.delta == b.delta;
    case PredicateId::KRealTimeReads: return a.k == b.k && a.k_reads_literal == b.k_reads_literal;
    case PredicateId::EventualVisibility: return a.ev_slack == b.ev_slack;
    case PredicateId::Quiescent: return a.q_slack == b.q_slack;
    default: return true;
  }
}

}  // namespace detail

/// True when every predicate of `weak` is a predicate of `strong` (with equal
/// parameters) or follows from them by the fixed-execution implication rules.
inline bool structurally_implied(const BoundModel& strong, const BoundModel& weak) {
  using P = PredicateId;
  if (strong.rdt.name != weak.rdt.name) return false;
  std::set<P> have;
  for (auto p : strong.def.predicates) {
    bool causal = p == P::CausalVisibility || p == P::CausalArbitration || p == P::NoCircularCausality;
    // Per-object happens-before is smaller, so it only supports itself.
    if (causal && strong.def.per_object_hb && !weak.def.per_object_hb) continue;
    have.insert(p);
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& r : detail::implication_rules()) {
      if (have.count(r.conclusion)) continue;
      bool all = std::all_of(r.premises.begin(), r.premises.end(), [&](P q) { return have.count(q) > 0; });
      if (all) {
        have.insert(r.conclusion);
        grew = true;
      }
    }
  }
  for (auto p : weak.def.predicates) {
    if (!have.count(p)) return false;
    bool derived = !strong.def.has(p);
    // A derived K-RealTimeReads comes from RealTime, which covers every k.
    if (!derived && !detail::parameters_match(p, strong, weak)) return false;
    if (derived && (p == P::TimedVisibility || p == P::EventualVisibility || p == P::Quiescent))
      return false;
  }
  return true;
}

/// The implication graph over the registered models.
inline ModelGraph model_graph() {
  static const std::vector<std::pair<const char*, const char*>> pairs{
      // {weaker, stronger}
      {"sequential", "linearizability"},
      {"pram", "sequential"},
      {"regular", "linearizability"},
      {"safe", "regular"},
      {"prefix-linearizable", "linearizability"},
      {"prefix-sequential", "prefix-linearizable"},
      {"prefix-sequential", "sequential"},
      {"k-linearizability", "linearizability"},
      {"prefix-linearizable", "k-linearizability"},
      {"timed-linearizability", "linearizability"},
      {"linearizability", "timed-linearizability"},
      {"timed-visibility", "timed-linearizability"},
      {"timed-visibility", "timed-causality"},
      {"causality", "sequential"},
      {"real-time-causality", "linearizability"},
      {"causality", "real-time-causality"},
      {"causality", "causal+"},
      {"causality", "timed-causality"},
      {"per-object-causal", "causality"},
      {"pram", "causality"},
      {"monotonic-reads", "causality"},
      {"read-your-writes", "causality"},
      {"monotonic-writes", "causality"},
      {"writes-follow-reads", "causality"},
      {"read-your-writes", "pram"},
      {"monotonic-reads", "pram"},
      {"monotonic-writes", "pram"},
      {"eventual-consistency", "strong-eventual-consistency"},
      {"pram", "processor-consistency"},
      {"processor-consistency", "sequential"},
      {"per-object-sequential", "processor-consistency"},
      {"per-object-sequential", "sequential"},
      {"per-object-pram", "per-object-sequential"},
      {"per-object-pram", "pram"},
      {"fork-linearizability", "linearizability"},
      {"fork-sequential", "fork-linearizability"},
      {"fork*", "fork-linearizability"},
      {"weak-fork-linearizability", "fork-linearizability"},
      {"pram", "fork-sequential"},
  };
  ModelGraph g;
  for (const auto& m : list_models()) g.nodes.push_back(m.name);
  for (const auto& [weak, strong] : pairs) {
    Edge e{audit_point(weak), audit_point(strong), EdgeStatus::unaudited};
    if (structurally_implied(e.strong.bound(), e.weak.bound())) e.status = EdgeStatus::proven_conjunct;
    g.edges.push_back(std::move(e));
  }
  return g;
}

/// Implication at the history level, measured on histories of sampled
/// executions that satisfy the stronger model.
enum class HistoryLevel { not_checked, pass, refuted, inconclusive };

inline const char* to_string(HistoryLevel s) {
  switch (s) {
    case HistoryLevel::not_checked: return "not-checked";
    case HistoryLevel::pass: return "pass";
    case HistoryLevel::refuted: return "refuted";
    case HistoryLevel::inconclusive: return "inconclusive";
  }
  return "?";
}

struct EdgeReport {
  Edge edge;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  /// Samples whose execution satisfied the stronger model.
  std::size_t strong_satisfied = 0;
  bool pass = true;
  /// Replayable counterexample: the sample index that produced it and the
  /// serialized execution.
  std::optional<std::size_t> counterexample_sample;
  std::optional<ojson> counterexample;
  HistoryLevel history_level = HistoryLevel::not_checked;
  std::size_t histories_checked = 0;
  std::optional<std::string> history_counterexample;
};

struct AuditOptions {
  std::size_t history_samples = 40;
  std::uint64_t history_budget = 200'000;
};

namespace detail {

inline std::uint64_t sample_seed(std::uint64_t seed, std::size_t i) {
  // splitmix64 step, so neighbouring seeds give unrelated samples
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline GeneratorConfig audit_config(std::uint64_t s, std::size_t max_ops) {
  Rng rng(s);
  GeneratorConfig cfg;
  cfg.procs = 2 + draw(rng, 2);
  cfg.objects = 1 + draw(rng, 2);
  cfg.ops = 2 + draw(rng, max_ops - 1);
  cfg.values = 2 + static_cast<std::int64_t>(draw(rng, 2));
  cfg.read_ratio = 0.5;
  cfg.pending_ratio = 0.2;
  cfg.vis_density = 0.3 + 0.1 * static_cast<double>(draw(rng, 5));
  cfg.distinct_timestamps = true;
  return cfg;
}

}  // namespace detail

/// Samples `n` executions biased toward `strong` and checks that those
/// satisfying it also satisfy `weak`. Stops at the first counterexample.
inline EdgeReport verify_edge(const ModelPoint& strong, const ModelPoint& weak, std::size_t n,
                              std::uint64_t seed, const AuditOptions& opt = {}) {
  EdgeReport rep;
  rep.edge = Edge{weak, strong, EdgeStatus::unaudited};
  rep.seed = seed;
  const auto sm = strong.bound();
  const auto wm = weak.bound();
  const bool proven = structurally_implied(sm, wm);
  CheckOptions copt;
  copt.budget = opt.history_budget;
  bool history_unknown = false;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = detail::sample_seed(seed, i);
    auto a = random_abstract_execution(detail::audit_config(s, 6), s, sm);
    ++rep.samples;
    if (!satisfies(a, sm)) continue;
    ++rep.strong_satisfied;
    if (!satisfies(a, wm)) {
      rep.pass = false;
      rep.counterexample_sample = i;
      rep.counterexample = execution_to_json(a);
      auto r = check_history(a.history(), wm, copt);
      if (exhaustively_violated(r)) {
        rep.history_level = HistoryLevel::refuted;
        rep.history_counterexample = write_history(a.history());
      }
      ++rep.histories_checked;
      break;
    }
    if (rep.histories_checked < opt.history_samples && a.size() <= 5 &&
        rep.history_level != HistoryLevel::refuted) {
      ++rep.histories_checked;
      auto r = check_history(a.history(), wm, copt);
      if (exhaustively_violated(r)) {
        rep.history_level = HistoryLevel::refuted;
        rep.history_counterexample = write_history(a.history());
      } else if (r.outcome != Outcome::Satisfied) {
        history_unknown = true;
      }
    }
  }
  if (rep.history_level == HistoryLevel::not_checked && rep.histories_checked > 0)
    rep.history_level = history_unknown ? HistoryLevel::inconclusive : HistoryLevel::pass;
  if (!rep.pass) rep.edge.status = EdgeStatus::refuted;
  else rep.edge.status = proven ? EdgeStatus::proven_conjunct : EdgeStatus::audited_pass;
  return rep;
}

/// Re-evaluates a report's counterexample; true when it satisfies the
/// stronger model and violates the weaker one.
inline bool replay_counterexample(const EdgeReport& rep) {
  if (!rep.counterexample) return false;
  auto a = execution_from_json(*rep.counterexample);
  return satisfies(a, rep.edge.strong.bound()) && !satisfies(a, rep.edge.weak.bound());
}

/// Audits every edge of the graph, in parallel across edges; the result is
/// in graph order and independent of scheduling.
inline std::vector<EdgeReport> audit_graph(const ModelGraph& g, std::size_t n, std::uint64_t seed,
                                           const AuditOptions& opt = {}, std::size_t threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<EdgeReport> out(g.edges.size());
  for (std::size_t base = 0; base < g.edges.size(); base += threads) {
    std::vector<std::future<EdgeReport>> jobs;
    for (std::size_t i = base; i < std::min(g.edges.size(), base + threads); ++i) {
      const auto& e = g.edges[i];
      jobs.push_back(std::async(std::launch::async,
                                [&, e] { return verify_edge(e.strong, e.weak, n, seed, opt); }));
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) out[base + j] = jobs[j].get();
  }
  return out;
}

inline ojson edge_report_to_json(const EdgeReport& r) {
  ojson j;
  j["weak"] = r.edge.weak.label();
  j["strong"] = r.edge.strong.label();
  j["status"] = to_string(r.edge.status);
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["strong_satisfied"] = r.strong_satisfied;
  j["counterexample_sample"] =
      r.counterexample_sample ? ojson(*r.counterexample_sample) : ojson(nullptr);
  j["counterexample"] = r.counterexample ? *r.counterexample : ojson(nullptr);
  j["history_level"] = to_string(r.history_level);
  j["histories_checked"] = r.histories_checked;
  j["history_counterexample"] =
      r.history_counterexample ? ojson(*r.history_counterexample) : ojson(nullptr);
  return j;
}

inline std::string edge_report_to_text(const EdgeReport& r) {
  std::ostringstream out;
  out << r.edge.strong.label() << " -> " << r.edge.weak.label() << ": " << to_string(r.edge.status)
      << " (" << r.strong_satisfied << "/" << r.samples << " samples satisfied the stronger model"
      << "; history level " << to_string(r.history_level) << " over " << r.histories_checked
      << ")";
  if (r.counterexample_sample) out << "; counterexample at sample " << *r.counterexample_sample;
  return out.str();
}

inline std::string graph_to_dot(const ModelGraph& g, const std::vector<EdgeReport>& reports = {}) {
  std::ostringstream out;
  out << "digraph hierarchy {\n  rankdir=BT;\n";
  for (const auto& n : g.nodes) out << "  \"" << n << "\";\n";
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = i < reports.size() ? reports[i].edge : g.edges[i];
    const char* style = e.status == EdgeStatus::refuted     ? "dashed, color=red"
                        : e.status == EdgeStatus::unaudited ? "dotted"
                                                            : "solid";
    out << "  \"" << e.weak.name << "\" -> \"" << e.strong.name << "\" [label=\""
        << to_string(e.status) << "\", style=" << style << "];\n";
  }
  out << "}\n";
  return out.str();
}

// -- separations -----------------------------------------------------------------

struct Separation {
  History history;
  /// Attempt that produced the unshrunk history.
  std::size_t attempt = 0;
  /// Whether the direct enumeration agreed with the model-specific search.
  bool cross_checked = false;
};

namespace detail {

inline bool separates(const History& h, const BoundModel& weak, const BoundModel& strong,
                      const CheckOptions& opt) {
  return check_history(h, weak, opt).outcome == Outcome::Satisfied &&
         exhaustively_violated(check_history(h, strong, opt));
}

}  // namespace detail

/// Randomly searches for a history that satisfies `weak` and violates
/// `strong`, then shrinks it. `budget` is the number of sampled executions.
/// Histories of at most four operations are re-decided by direct enumeration
/// before being returned.
inline std::optional<Separation> find_separation(const ModelPoint& weak, const ModelPoint& strong,
                                                 std::size_t budget, std::uint64_t seed,
                                                 std::size_t max_ops = 6) {
  const auto wm = weak.bound();
  const auto sm = strong.bound();
  CheckOptions opt;
  opt.budget = 1'000'000;
  CheckOptions full = opt;
  full.force_full = true;
  for (std::size_t i = 0; i < budget; ++i) {
    auto s = detail::sample_seed(seed, i);
    auto a = random_abstract_execution(detail::audit_config(s, max_ops), s, wm);
    if (!satisfies(a, wm) || satisfies(a, sm)) continue;
    const auto& h = a.history();
    if (!exhaustively_violated(check_history(h, sm, opt))) continue;
    History small = shrink_if(h, [&](const History& c) { return detail::separates(c, wm, sm, opt); });
    Separation sep{small, i, false};
    if (small.size() <= 4) {
      if (!detail::separates(small, wm, sm, full)) continue;
      sep.cross_checked = true;
    }
    return sep;
  }
  return std::nullopt;
}

}  // namespace conscheck

#endif  // CONSCHECK_HIERARCHY_HPP
