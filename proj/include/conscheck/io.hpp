#pragma once
#ifndef CONSCHECK_IO_HPP
#define CONSCHECK_IO_HPP

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "checker.hpp"
#include "history.hpp"

namespace conscheck {

using ojson = nlohmann::ordered_json;

/// A malformed history or witness file. `line` is 1-based, 0 when unknown.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr const char* bottom_token = "bottom";

inline ojson value_to_json(const Value& v) {
  if (v.is_bottom()) return bottom_token;
  if (v.is_int()) return v.as_int();
  if (v.is_text()) return v.as_text();
  throw std::invalid_argument("the placeholder has no serialized form");
}

inline Value value_from_json(const ojson& j) {
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == bottom_token) return Value::bottom();
    return Value(std::move(s));
  }
  throw std::invalid_argument("values must be integers or strings");
}

inline ojson operation_to_json(const Operation& op) {
  ojson j;
  j["id"] = op.id.value;
  j["proc"] = op.proc;
  j["type"] = op.type;
  j["obj"] = op.obj;
  if (!op.ival.is_placeholder()) j["ival"] = value_to_json(op.ival);
  if (op.oval) j["oval"] = value_to_json(*op.oval);
  j["stime"] = op.stime;
  if (op.rtime) j["rtime"] = *op.rtime;
  return j;
}

/// Serializes a history, one operation per line in id order, after optional
/// "#" header lines.
inline std::string write_history(const History& h, const std::vector<std::string>& header = {}) {
  std::string out;
  for (const auto& line : header) out += "# " + line + "\n";
  for (const auto& op : h.ops()) out += operation_to_json(op).dump() + "\n";
  return out;
}

struct ParsedHistory {
  History history;
  std::vector<std::string> header;
};

/// Reads the line format back. Records without an "id" are numbered from 1 in
/// file order; a file must either give every record an id or none.
inline ParsedHistory parse_history(std::istream& in) {
  ParsedHistory out;
  std::vector<Operation> ops;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t next_id = 1;
  bool explicit_ids = false, implicit_ids = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      auto text = line.substr(first + 1);
      if (!text.empty() && text.front() == ' ') text.erase(0, 1);
      if (!text.empty() && text.back() == '\r') text.pop_back();
      out.header.push_back(text);
      continue;
    }
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const std::exception& e) {
      throw FormatError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw FormatError(lineno, "record must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      static const std::vector<std::string> known{"id", "proc", "type", "obj", "ival",
                                                  "oval", "stime", "rtime"};
      if (std::find(known.begin(), known.end(), it.key()) == known.end())
        throw FormatError(lineno, "unknown field '" + it.key() + "'");
    }
    try {
      Operation op;
      if (j.contains("id")) {
        if (!j["id"].is_number_unsigned()) throw std::invalid_argument("id must be a non-negative integer");
        op.id = OpId{j["id"].get<std::uint64_t>()};
        explicit_ids = true;
      } else {
        op.id = OpId{next_id};
        implicit_ids = true;
      }
      if (explicit_ids && implicit_ids)
        throw std::invalid_argument("either every record or no record may carry an id");
      ++next_id;
      for (const char* key : {"proc", "type", "obj"}) {
        if (!j.contains(key) || !j[key].is_string())
          throw std::invalid_argument(std::string("missing string field '") + key + "'");
      }
      op.proc = j["proc"].get<std::string>();
      op.type = j["type"].get<std::string>();
      op.obj = j["obj"].get<std::string>();
      op.ival = j.contains("ival") ? value_from_json(j["ival"]) : Value::placeholder();
      if (j.contains("oval")) op.oval = value_from_json(j["oval"]);
      if (!j.contains("stime") || !j["stime"].is_number_unsigned())
        throw std::invalid_argument("stime must be a non-negative integer");
      op.stime = j["stime"].get<std::uint64_t>();
      if (j.contains("rtime")) {
        if (!j["rtime"].is_number_unsigned())
          throw std::invalid_argument("rtime must be a non-negative integer");
        op.rtime = j["rtime"].get<std::uint64_t>();
      }
      ops.push_back(std::move(op));
      lines.push_back(lineno);
    } catch (const std::invalid_argument& e) {
      throw FormatError(lineno, e.what());
    }
  }
  try {
    out.history = build_history(ops);
  } catch (const HistoryError& e) {
    std::size_t where = 0;
    if (auto id = e.op_id())
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].id == *id) where = lines[i];
    throw FormatError(where, e.what());
  }
  return out;
}

inline ParsedHistory parse_history(const std::string& text) {
  std::istringstream in(text);
  return parse_history(in);
}

// -- witnesses ---------------------------------------------------------------

struct WitnessData {
  std::vector<std::uint64_t> ar_sequence;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ar;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> vis;
  std::vector<std::uint64_t> h_prime;
  friend bool operator==(const WitnessData&, const WitnessData&) = default;
};

inline WitnessData witness_data(const AbstractExecution& a, const std::vector<std::size_t>& h_prime) {
  const auto& h = a.history();
  WitnessData w;
  for (auto i : a.ar_sequence()) w.ar_sequence.push_back(h.id(i).value);
  for (const auto& [x, y] : a.ar().pairs()) w.ar.emplace_back(h.id(x).value, h.id(y).value);
  for (const auto& [x, y] : a.vis().pairs()) w.vis.emplace_back(h.id(x).value, h.id(y).value);
  for (auto i : h_prime) w.h_prime.push_back(h.id(i).value);
  return w;
}

inline ojson witness_to_json(const WitnessData& w) {
  ojson j;
  j["ar_sequence"] = w.ar_sequence;
  j["ar"] = ojson::array();
  for (const auto& [a, b] : w.ar) j["ar"].push_back({a, b});
  j["vis"] = ojson::array();
  for (const auto& [a, b] : w.vis) j["vis"].push_back({a, b});
  j["h_prime"] = w.h_prime;
  return j;
}

inline WitnessData witness_from_json(const ojson& j) {
  WitnessData w;
  auto pairs = [](const ojson& arr) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    if (!arr.is_array()) throw std::invalid_argument("expected an array of id pairs");
    for (const auto& p : arr) {
      if (!p.is_array() || p.size() != 2) throw std::invalid_argument("expected an id pair");
      out.emplace_back(p[0].get<std::uint64_t>(), p[1].get<std::uint64_t>());
    }
    return out;
  };
  if (j.contains("ar_sequence")) w.ar_sequence = j["ar_sequence"].get<std::vector<std::uint64_t>>();
  if (j.contains("ar")) w.ar = pairs(j["ar"]);
  if (!j.contains("vis")) throw std::invalid_argument("witness lacks vis");
  w.vis = pairs(j["vis"]);
  if (j.contains("h_prime")) w.h_prime = j["h_prime"].get<std::vector<std::uint64_t>>();
  if (w.ar.empty() && w.ar_sequence.empty() && j.contains("ar") == false)
    throw std::invalid_argument("witness lacks ar");
  return w;
}

/// Rebuilds the execution a witness describes over `h`. ar is taken from the
/// pair list when present, otherwise from the sequence.
inline AbstractExecution witness_execution(std::shared_ptr<const History> h, const WitnessData& w) {
  const auto n = h->size();
  auto idx = [&](std::uint64_t id) { return h->require_index(OpId{id}); };
  Relation vis(n);
  for (const auto& [a, b] : w.vis) vis.insert(idx(a), idx(b));
  if (!w.ar.empty() || n <= 1) {
    Relation ar(n);
    for (const auto& [a, b] : w.ar) ar.insert(idx(a), idx(b));
    return AbstractExecution(std::move(h), std::move(vis), std::move(ar));
  }
  std::vector<std::size_t> seq;
  for (auto id : w.ar_sequence) seq.push_back(idx(id));
  return AbstractExecution::from_sequence(std::move(h), std::move(vis), std::move(seq));
}

// -- reports -------------------------------------------------------------------

struct PredicateLine {
  std::string name;
  bool holds = true;
  std::vector<std::uint64_t> evidence;
  friend bool operator==(const PredicateLine&, const PredicateLine&) = default;
};

/// Everything the CLI says about one check, in id terms so it can be
/// serialized and read back without the history.
struct Report {
  std::string model;
  std::string definition;
  std::string verdict;
  std::string completeness;
  std::string strategy;
  std::string reason;
  /// Per-predicate breakdown on the witness, or on the candidate that came
  /// closest when the model is violated.
  std::vector<PredicateLine> predicates;
  std::optional<WitnessData> witness;
  std::optional<WitnessData> closest;
  std::vector<std::uint64_t> evidence;
  SearchStats stats;
  friend bool operator==(const Report&, const Report&) = default;
};

namespace detail {

inline std::vector<PredicateLine> breakdown(const AbstractExecution& a, const BoundModel& m) {
  std::vector<PredicateLine> out;
  for (const auto& r : evaluate_model(a, m).results) {
    PredicateLine line{std::string(predicate_name(r.id)), r.holds, {}};
    for (auto i : r.evidence) line.evidence.push_back(a.history().id(i).value);
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace detail

inline Report make_report(const History& h, const BoundModel& m, const CheckResult& r,
                          std::uint64_t closest_budget = 200'000) {
  Report rep;
  rep.model = m.def.name;
  rep.definition = describe_model(m.def);
  rep.verdict = to_string(r.outcome);
  rep.completeness = to_string(r.completeness);
  rep.strategy = to_string(r.strategy);
  rep.reason = r.reason;
  rep.stats = r.stats;
  for (auto i : r.evidence) rep.evidence.push_back(h.id(i).value);
  if (r.witness) {
    rep.witness = witness_data(*r.witness, r.h_prime);
    rep.predicates = detail::breakdown(*r.witness, m);
    return rep;
  }
  // Closest candidate: most predicates holding, first found on ties.
  std::size_t best = 0;
  CheckOptions opt;
  opt.budget = closest_budget;
  try {
    search_extensions(
        h, m,
        [&](const AbstractExecution& a, const std::vector<std::size_t>& hp) {
          auto v = evaluate_model(a, m);
          std::size_t holds = 0;
          for (const auto& x : v.results) holds += x.holds ? 1 : 0;
          if (!rep.closest || holds > best) {
            best = holds;
            rep.closest = witness_data(a, hp);
            rep.predicates = detail::breakdown(a, m);
          }
          return false;
        },
        opt);
  } catch (const std::runtime_error&) {
  }
  return rep;
}

inline ojson report_to_json(const Report& r) {
  ojson j;
  j["model"] = r.model;
  j["definition"] = r.definition;
  j["verdict"] = r.verdict;
  j["completeness"] = r.completeness;
  j["strategy"] = r.strategy;
  j["reason"] = r.reason;
  j["predicates"] = ojson::array();
  for (const auto& p : r.predicates)
    j["predicates"].push_back({{"name", p.name}, {"holds", p.holds}, {"evidence", p.evidence}});
  j["witness"] = r.witness ? witness_to_json(*r.witness) : ojson(nullptr);
  j["closest"] = r.closest ? witness_to_json(*r.closest) : ojson(nullptr);
  j["evidence"] = r.evidence;
  j["stats"] = {{"nodes", r.stats.nodes}, {"prunes", r.stats.prunes},
                {"candidates", r.stats.candidates}};
  return j;
}

inline Report report_from_json(const ojson& j) {
  Report r;
  r.model = j.at("model").get<std::string>();
  r.definition = j.at("definition").get<std::string>();
  r.verdict = j.at("verdict").get<std::string>();
  r.completeness = j.at("completeness").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.reason = j.at("reason").get<std::string>();
  for (const auto& p : j.at("predicates"))
    r.predicates.push_back({p.at("name").get<std::string>(), p.at("holds").get<bool>(),
                            p.at("evidence").get<std::vector<std::uint64_t>>()});
  if (!j.at("witness").is_null()) r.witness = witness_from_json(j.at("witness"));
  if (!j.at("closest").is_null()) r.closest = witness_from_json(j.at("closest"));
  r.evidence = j.at("evidence").get<std::vector<std::uint64_t>>();
  const auto& s = j.at("stats");
  r.stats.nodes = s.at("nodes").get<std::uint64_t>();
  r.stats.prunes = s.at("prunes").get<std::uint64_t>();
  r.stats.candidates = s.at("candidates").get<std::uint64_t>();
  return r;
}

namespace detail {

inline std::string pairs_text(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& ps) {
  std::string s = "{";
  for (std::size_t i = 0; i < ps.size(); ++i)
    s += (i ? ", " : "") + std::string("(") + std::to_string(ps[i].first) + "," +
         std::to_string(ps[i].second) + ")";
  return s + "}";
}

inline std::string ids_text(const std::vector<std::uint64_t>& ids, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? sep : "") + std::to_string(ids[i]);
  return s;
}

}  // namespace detail

inline std::string report_to_text(const Report& r) {
  std::ostringstream out;
  out << r.model << ": " << r.verdict << " (" << r.completeness << ", strategy " << r.strategy
      << ")\n";
  out << "  " << r.definition << "\n";
  if (!r.reason.empty()) out << "  " << r.reason << "\n";
  if (!r.evidence.empty()) out << "  evidence: " << detail::ids_text(r.evidence) << "\n";
  const WitnessData* w = r.witness ? &*r.witness : (r.closest ? &*r.closest : nullptr);
  if (w) {
    out << (r.witness ? "  witness\n" : "  closest candidate\n");
    out << "    ar  = [" << detail::ids_text(w->ar_sequence, " < ") << "]\n";
    out << "    vis = " << detail::pairs_text(w->vis) << "\n";
    out << "    H'  = {" << detail::ids_text(w->h_prime) << "}\n";
  }
  for (const auto& p : r.predicates) {
    out << "    " << (p.holds ? "ok   " : "FAIL ") << p.name;
    if (!p.evidence.empty()) out << "  [" << detail::ids_text(p.evidence) << "]";
    out << "\n";
  }
  out << "  search: " << r.stats.nodes << " nodes, " << r.stats.prunes << " prunes, "
      << r.stats.candidates << " candidates\n";
  return out.str();
}

/// Serializes an execution together with its history, so a counterexample
/// can be replayed from a single JSON document.
inline ojson execution_to_json(const AbstractExecution& a, const std::vector<std::size_t>& h_prime = {}) {
  ojson j;
  j["history"] = ojson::array();
  for (const auto& op : a.history().ops()) j["history"].push_back(operation_to_json(op));
  j["witness"] = witness_to_json(witness_data(a, h_prime));
  return j;
}

inline AbstractExecution execution_from_json(const ojson& j) {
  std::string lines;
  for (const auto& op : j.at("history")) lines += op.dump() + "\n";
  auto parsed = parse_history(lines);
  return witness_execution(share(std::move(parsed.history)), witness_from_json(j.at("witness")));
}

}  // namespace conscheck

#endif  // CONSCHECK_IO_HPP
