#pragma once
#ifndef CONSCHECK_CLI_HPP
#define CONSCHECK_CLI_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "checker.hpp"
#include "hierarchy.hpp"
#include "io.hpp"
#include "models.hpp"
#include "simulator.hpp"

namespace conscheck {

/// Exit codes of the command-line tool.
namespace exit_code {
inline constexpr int satisfied = 0;
inline constexpr int violated = 1;
inline constexpr int unknown = 2;
inline constexpr int usage = 64;
inline constexpr int bad_input = 65;
}  // namespace exit_code

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

namespace detail {

/// Raised for unreadable or malformed input files.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline History load_history(const std::string& path) {
  try {
    return parse_history(read_file(path)).history;
  } catch (const FormatError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

struct ParamFlags {
  CLI::Option* delta = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* ev = nullptr;
  CLI::Option* q = nullptr;
  std::uint64_t delta_v = 0, k_v = 0, ev_v = 0, q_v = 0;
  std::string rdt = "register";

  void attach(CLI::App* app, const std::string& prefix = "") {
    delta = app->add_option("--" + prefix + "delta", delta_v, "visibility bound for timed models");
    k = app->add_option("--" + prefix + "k", k_v, "version bound for K-linearizability");
    ev = app->add_option("--" + prefix + "ev-slack", ev_v, "tolerated invisible successors");
    q = app->add_option("--" + prefix + "q-slack", q_v, "tolerated non-final reads per session");
    if (prefix.empty())
      app->add_option("--rdt", rdt, "replicated data type")->check(CLI::IsMember({"register", "counter"}));
  }

  ModelParams params() const {
    ModelParams p;
    if (delta->count()) p.delta = delta_v;
    if (k->count()) p.k_versions = k_v;
    if (ev->count()) p.ev_slack = ev_v;
    if (q->count()) p.q_slack = q_v;
    p.rdt = rdt;
    return p;
  }

  /// Parameters for a model on the audit graph: explicit flags win,
  /// otherwise the graph's comparison point.
  ModelPoint point(const std::string& name) const {
    auto pt = audit_point(name);
    if (delta->count()) pt.params.delta = delta_v;
    if (k->count()) pt.params.k_versions = k_v;
    if (ev->count()) pt.params.ev_slack = ev_v;
    if (q->count()) pt.params.q_slack = q_v;
    return pt;
  }
};

inline int outcome_status(Outcome o) {
  switch (o) {
    case Outcome::Satisfied: return exit_code::satisfied;
    case Outcome::Violated: return exit_code::violated;
    case Outcome::Unknown: return exit_code::unknown;
  }
  return exit_code::unknown;
}

}  // namespace detail

/// Runs one command line (without the program name) and captures its output.
inline CliResult run_cli(const std::vector<std::string>& args) {
  CliResult res;
  CLI::App app{"Consistency-model checker for operation histories", "conscheck"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "human";
  app.add_option("--format", format, "output rendering")->check(CLI::IsMember({"human", "machine"}));

  // check
  auto* check = app.add_subcommand("check", "decide whether a history satisfies a model");
  std::string model, input, witness_out, verify_path;
  std::uint64_t budget = default_budget();
  detail::ParamFlags check_params;
  check->add_option("--model", model, "model name or predicate conjunction")->required();
  check->add_option("--input", input, "history file")->required();
  check->add_option("--budget", budget, "search budget in nodes")->check(CLI::PositiveNumber);
  check->add_option("--witness", witness_out, "write the witness execution here");
  check->add_option("--verify-witness", verify_path, "validate a witness file instead of searching");
  check_params.attach(check);

  // models
  auto* models = app.add_subcommand("models", "list registered models");

  // audit
  auto* audit = app.add_subcommand("audit", "audit the implication graph");
  std::size_t samples = 10'000;
  std::uint64_t seed = 0;
  std::string edge, dot_out;
  std::size_t threads = 0;
  audit->add_option("--samples", samples, "executions sampled per edge");
  audit->add_option("--seed", seed, "random seed");
  audit->add_option("--edge", edge, "audit only WEAK,STRONG");
  audit->add_option("--dot", dot_out, "write the graph in dot format here");
  audit->add_option("--threads", threads, "worker threads (0 = all cores)");

  // separate
  auto* separate = app.add_subcommand("separate", "search a history separating two models");
  std::string weak, strong;
  std::size_t attempts = 20'000, max_ops = 6;
  detail::ParamFlags weak_params, strong_params;
  separate->add_option("--weak", weak, "model the history must satisfy")->required();
  separate->add_option("--strong", strong, "model the history must violate")->required();
  separate->add_option("--budget", attempts, "sampled executions");
  separate->add_option("--seed", seed, "random seed");
  separate->add_option("--max-ops", max_ops, "largest sampled history")->check(CLI::Range(1, 8));
  weak_params.attach(separate, "weak-");
  strong_params.attach(separate, "strong-");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "generate a history from a simulated store");
  std::string mode;
  GeneratorConfig gen;
  StoreConfig store;
  bool no_sticky = false;
  simulate_cmd->add_option("--mode", mode, "store mode")
      ->required()
      ->check(CLI::IsMember({"linearizable", "sequential", "causal", "eventual", "pram"}));
  simulate_cmd->add_option("--procs", gen.procs, "client processes")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--ops", gen.ops, "operations in the workload");
  simulate_cmd->add_option("--objects", gen.objects, "objects")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--read-ratio", gen.read_ratio, "fraction of reads")->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--seed", seed, "random seed");
  simulate_cmd->add_option("--replicas", store.replicas, "replicas")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--min-delay", store.min_delay, "smallest replica link delay");
  simulate_cmd->add_option("--max-delay", store.max_delay, "largest replica link delay");
  simulate_cmd->add_option("--client-delay", store.client_delay, "largest client link delay");
  simulate_cmd->add_option("--anti-entropy", store.anti_entropy, "anti-entropy period (eventual)");
  simulate_cmd->add_flag("--no-sticky", no_sticky, "route each request to a random replica");
  simulate_cmd->add_option("--cutoff", store.cutoff, "stop the run at this tick");

  // shrink
  auto* shrink = app.add_subcommand("shrink", "shrink a violating history");
  std::string shrink_model, shrink_input;
  detail::ParamFlags shrink_params;
  shrink->add_option("--model", shrink_model, "model name")->required();
  shrink->add_option("--input", shrink_input, "history file")->required();
  shrink->add_option("--budget", budget, "search budget in nodes")->check(CLI::PositiveNumber);
  shrink_params.attach(shrink);

  std::ostringstream out, err;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return {exit_code::satisfied, out.str(), err.str()};
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return {exit_code::usage, out.str(), err.str()};
  }
  const bool machine = format == "machine";

  try {
    if (*check) {
      auto m = conscheck::bind(model, check_params.params());
      auto h = detail::load_history(input);
      if (!verify_path.empty()) {
        ojson j;
        try {
          j = ojson::parse(detail::read_file(verify_path));
        } catch (const ojson::parse_error& e) {
          throw detail::InputError(verify_path + ": " + e.what());
        }
        bool ok = false;
        try {
          ok = validate_witness(witness_execution(share(h), witness_from_json(j)), m);
        } catch (const std::exception& e) {
          throw detail::InputError(verify_path + ": " + e.what());
        }
        if (machine) out << ojson{{"model", m.def.name}, {"witness_valid", ok}}.dump() << "\n";
        else out << m.def.name << ": witness " << (ok ? "valid" : "invalid") << "\n";
        return {ok ? exit_code::satisfied : exit_code::violated, out.str(), err.str()};
      }
      CheckOptions opt;
      opt.budget = budget;
      auto r = check_history(h, m, opt);
      auto rep = make_report(h, m, r);
      out << (machine ? report_to_json(rep).dump() + "\n" : report_to_text(rep));
      if (!witness_out.empty() && rep.witness) detail::write_file(witness_out, witness_to_json(*rep.witness).dump(2) + "\n");
      return {detail::outcome_status(r.outcome), out.str(), err.str()};
    }

    if (*models) {
      for (const auto& d : list_models()) {
        if (machine) {
          ojson preds = ojson::array();
          for (auto p : d.predicates) preds.push_back(predicate_name(p));
          out << ojson{{"name", d.name}, {"predicates", preds}, {"per_object_hb", d.per_object_hb}}.dump()
              << "\n";
        } else {
          out << describe_model(d) << "\n";
        }
      }
      return {exit_code::satisfied, out.str(), err.str()};
    }

    if (*audit) {
      auto g = model_graph();
      if (!edge.empty()) {
        auto comma = edge.find(',');
        if (comma == std::string::npos) throw ModelError("--edge expects WEAK,STRONG");
        auto w = audit_point(edge.substr(0, comma));
        auto s = audit_point(edge.substr(comma + 1));
        Edge e{w, s, structurally_implied(s.bound(), w.bound()) ? EdgeStatus::proven_conjunct
                                                                 : EdgeStatus::unaudited};
        g.edges = {e};
      }
      auto reports = audit_graph(g, samples, seed, {}, threads);
      bool refuted = false;
      ojson arr = ojson::array();
      for (const auto& r : reports) {
        refuted = refuted || r.edge.status == EdgeStatus::refuted;
        if (machine) arr.push_back(edge_report_to_json(r));
        else out << edge_report_to_text(r) << "\n";
      }
      if (machine) out << arr.dump() << "\n";
      if (!dot_out.empty()) detail::write_file(dot_out, graph_to_dot(g, reports));
      return {refuted ? exit_code::violated : exit_code::satisfied, out.str(), err.str()};
    }

    if (*separate) {
      auto w = weak_params.point(weak);
      auto s = strong_params.point(strong);
      auto sep = find_separation(w, s, attempts, seed, max_ops);
      if (!sep) {
        err << "no separating history found within " << attempts << " samples\n";
        return {exit_code::violated, out.str(), err.str()};
      }
      out << write_history(sep->history, {"separation weak=" + w.label() + " strong=" + s.label() +
                                          " seed=" + std::to_string(seed) +
                                          " attempt=" + std::to_string(sep->attempt)});
      return {exit_code::satisfied, out.str(), err.str()};
    }

    if (*simulate_cmd) {
      store.mode = store_mode_by_name(mode);
      store.sticky = !no_sticky;
      if (store.min_delay > store.max_delay) throw ModelError("--min-delay exceeds --max-delay");
      out << simulation_text(simulate(store, gen, seed));
      return {exit_code::satisfied, out.str(), err.str()};
    }

    if (*shrink) {
      auto m = conscheck::bind(shrink_model, shrink_params.params());
      auto h = detail::load_history(shrink_input);
      CheckOptions opt;
      opt.budget = budget;
      auto r = check_history(h, m, opt);
      if (!exhaustively_violated(r)) {
        err << "history is not provably violated under " << m.def.name << " (" << to_string(r.outcome)
            << ")\n";
        return {r.outcome == Outcome::Satisfied ? exit_code::violated : exit_code::unknown, out.str(),
                err.str()};
      }
      auto small = shrink_history(h, m, opt);
      out << write_history(small, {"shrunk under " + m.def.name + " from " + std::to_string(h.size()) +
                                   " to " + std::to_string(small.size()) + " operations"});
      return {exit_code::satisfied, out.str(), err.str()};
    }
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return {exit_code::usage, out.str(), err.str()};
  } catch (const detail::InputError& e) {
    err << "error: " << e.what() << "\n";
    return {exit_code::bad_input, out.str(), err.str()};
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return {exit_code::usage, out.str(), err.str()};
  }
  return {exit_code::usage, out.str(), err.str()};
}

}  // namespace conscheck

#endif  // CONSCHECK_CLI_HPP
