#pragma once
#ifndef CONSCHECK_MODELS_HPP
#define CONSCHECK_MODELS_HPP

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "predicates.hpp"

namespace conscheck {

namespace detail {

inline ModelDefinition def(std::string name, std::vector<PredicateId> preds, bool hbo = false) {
  return ModelDefinition{std::move(name), std::move(preds), hbo};
}

inline std::string normalize_model_name(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
    else if (c == '+' || c == '*') out.push_back(static_cast<char>(c));
  }
  return out;
}

}  // namespace detail

/// Every registered model, in a fixed order.
inline const std::vector<ModelDefinition>& list_models() {
  using P = PredicateId;
  using detail::def;
  static const std::vector<ModelDefinition> models{
      def("linearizability", {P::SingleOrder, P::RealTime, P::RVal}),
      def("regular", {P::SingleOrder, P::RealTimeWrites, P::RVal}),
      def("safe", {P::SingleOrder, P::RealTimeWrites, P::SeqRVal}),
      def("sequential", {P::SingleOrder, P::PRAM, P::RVal}),
      def("pram", {P::PRAM, P::RVal}),
      def("monotonic-reads", {P::MonotonicReads, P::RVal}),
      def("read-your-writes", {P::ReadYourWrites, P::RVal}),
      def("monotonic-writes", {P::MonotonicWrites, P::RVal}),
      def("writes-follow-reads", {P::WritesFollowReads, P::RVal}),
      def("causality", {P::CausalVisibility, P::CausalArbitration, P::RVal}),
      def("causal+", {P::CausalVisibility, P::CausalArbitration, P::RVal, P::StrongConvergence}),
      def("real-time-causality",
          {P::CausalVisibility, P::CausalArbitration, P::RVal, P::RealTime}),
      def("eventual-consistency", {P::EventualVisibility, P::NoCircularCausality, P::RVal}),
      def("strong-eventual-consistency",
          {P::EventualVisibility, P::NoCircularCausality, P::RVal, P::StrongConvergence}),
      def("quiescent", {P::Quiescent}),
      def("timed-visibility", {P::TimedVisibility, P::RVal}),
      def("timed-causality",
          {P::CausalVisibility, P::CausalArbitration, P::RVal, P::TimedVisibility}),
      def("timed-linearizability", {P::SingleOrder, P::TimedVisibility, P::RVal}),
      def("prefix-sequential", {P::SingleOrder, P::MonotonicWrites, P::RVal}),
      def("prefix-linearizable", {P::SingleOrder, P::RealTimeWW, P::RVal}),
      def("k-linearizability", {P::SingleOrder, P::RealTimeWW, P::KRealTimeReads, P::RVal}),
      def("fork-linearizability", {P::PRAM, P::RealTime, P::NoJoin, P::RVal}),
      def("fork*", {P::ReadYourWrites, P::RealTime, P::AtMostOneJoin, P::RVal}),
      def("fork-sequential", {P::PRAM, P::NoJoin, P::RVal}),
      def("weak-fork-linearizability", {P::PRAM, P::KRealTime, P::AtMostOneJoin, P::RVal}),
      def("per-object-pram", {P::PerObjectPRAM, P::RVal}),
      def("per-object-sequential", {P::PerObjectSingleOrder, P::PerObjectPRAM, P::RVal}),
      def("processor-consistency", {P::PerObjectSingleOrder, P::PRAM, P::RVal}),
      def("per-object-causal", {P::CausalVisibility, P::CausalArbitration, P::RVal}, true),
  };
  return models;
}

inline const std::vector<std::pair<std::string, std::string>>& model_aliases() {
  static const std::vector<std::pair<std::string, std::string>> aliases{
      {"atomic", "linearizability"},
      {"linearizable", "linearizability"},
      {"lin", "linearizability"},
      {"sequentialconsistency", "sequential"},
      {"pramconsistency", "pram"},
      {"causal", "causality"},
      {"causalconsistency", "causality"},
      {"causalplus", "causal+"},
      {"quiescentconsistency", "quiescent"},
      {"prefixlinearizability", "prefix-linearizable"},
      {"klinearizable", "k-linearizability"},
      {"forkstar", "fork*"},
      {"weakforklin", "weak-fork-linearizability"},
      {"strongeventualcons", "strong-eventual-consistency"},
  };
  return aliases;
}

/// Looks a model up by name, ignoring case and punctuation other than '+'
/// and '*'. A conjunction of predicate names joined by '&', ',' or '∧' builds
/// an unregistered model, e.g. "MonotonicReads & MonotonicWrites & RVal".
inline std::optional<ModelDefinition> find_model(std::string_view name) {
  auto is_conjunction = name.find('&') != std::string_view::npos ||
                        name.find(',') != std::string_view::npos ||
                        name.find("∧") != std::string_view::npos;
  if (is_conjunction) {
    std::string s(name);
    for (std::size_t pos; (pos = s.find("∧")) != std::string::npos;) s.replace(pos, 3, "&");
    for (auto& c : s)
      if (c == ',') c = '&';
    ModelDefinition d;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto end = s.find('&', start);
      if (end == std::string::npos) end = s.size();
      std::string tok;
      for (std::size_t i = start; i < end; ++i)
        if (!std::isspace(static_cast<unsigned char>(s[i]))) tok.push_back(s[i]);
      std::optional<PredicateId> p;
      for (auto q : all_predicates)
        if (detail::normalize_model_name(predicate_name(q)) == detail::normalize_model_name(tok))
          p = q;
      if (!p) return std::nullopt;
      if (!d.has(*p)) d.predicates.push_back(*p);
      start = end + 1;
    }
    for (std::size_t i = 0; i < d.predicates.size(); ++i)
      d.name += (i ? "&" : "") + std::string(predicate_name(d.predicates[i]));
    return d;
  }
  auto key = detail::normalize_model_name(name);
  for (const auto& [alias, target] : model_aliases())
    if (key == alias) key = detail::normalize_model_name(target);
  for (const auto& m : list_models())
    if (detail::normalize_model_name(m.name) == key) return m;
  return std::nullopt;
}

inline ModelDefinition require_model(std::string_view name) {
  auto m = find_model(name);
  if (!m) throw ModelError("unknown model '" + std::string(name) + "'");
  return *m;
}

inline BoundModel bind(std::string_view name, const ModelParams& p = {}) {
  return bind(require_model(name), p);
}

/// "name = P1 ∧ P2 ∧ ..." with parameter names attached to parameterized
/// predicates.
inline std::string describe_model(const ModelDefinition& m) {
  std::string out = m.name + " =";
  for (std::size_t i = 0; i < m.predicates.size(); ++i) {
    auto p = m.predicates[i];
    out += i ? " ∧ " : " ";
    out += predicate_name(p);
    switch (p) {
      case PredicateId::KRealTimeReads: out += "(k_versions)"; break;
      case PredicateId::KRealTime: out += "(2)"; break;
      case PredicateId::EventualVisibility: out += "(ev_slack)"; break;
      case PredicateId::Quiescent: out += "(q_slack)"; break;
      case PredicateId::TimedVisibility: out += "(delta)"; break;
      default: break;
    }
  }
  if (m.per_object_hb) out += "  [hb = ((so ∩ ob) ∪ vis)⁺]";
  return out;
}

}  // namespace conscheck

#endif  // CONSCHECK_MODELS_HPP
