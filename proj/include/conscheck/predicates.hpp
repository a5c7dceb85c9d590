#pragma once
#ifndef CONSCHECK_PREDICATES_HPP
#define CONSCHECK_PREDICATES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "execution.hpp"
#include "rdt.hpp"

namespace conscheck {

enum class PredicateId {
  SingleOrder,
  RealTime,
  RealTimeWrites,
  RealTimeWW,
  KRealTimeReads,
  KRealTime,
  PRAM,
  MonotonicReads,
  ReadYourWrites,
  MonotonicWrites,
  WritesFollowReads,
  CausalVisibility,
  CausalArbitration,
  StrongConvergence,
  NoCircularCausality,
  EventualVisibility,
  Quiescent,
  TimedVisibility,
  NoJoin,
  AtMostOneJoin,
  PerObjectPRAM,
  PerObjectSingleOrder,
  RVal,
  SeqRVal,
};

inline constexpr std::array<PredicateId, 24> all_predicates{
    PredicateId::SingleOrder,        PredicateId::RealTime,
    PredicateId::RealTimeWrites,     PredicateId::RealTimeWW,
    PredicateId::KRealTimeReads,     PredicateId::KRealTime,
    PredicateId::PRAM,               PredicateId::MonotonicReads,
    PredicateId::ReadYourWrites,     PredicateId::MonotonicWrites,
    PredicateId::WritesFollowReads,  PredicateId::CausalVisibility,
    PredicateId::CausalArbitration,  PredicateId::StrongConvergence,
    PredicateId::NoCircularCausality, PredicateId::EventualVisibility,
    PredicateId::Quiescent,          PredicateId::TimedVisibility,
    PredicateId::NoJoin,             PredicateId::AtMostOneJoin,
    PredicateId::PerObjectPRAM,      PredicateId::PerObjectSingleOrder,
    PredicateId::RVal,               PredicateId::SeqRVal,
};

inline std::string_view predicate_name(PredicateId p) {
  switch (p) {
    case PredicateId::SingleOrder: return "SingleOrder";
    case PredicateId::RealTime: return "RealTime";
    case PredicateId::RealTimeWrites: return "RealTimeWrites";
    case PredicateId::RealTimeWW: return "RealTimeWW";
    case PredicateId::KRealTimeReads: return "K-RealTimeReads";
    case PredicateId::KRealTime: return "K-RealTime";
    case PredicateId::PRAM: return "PRAM";
    case PredicateId::MonotonicReads: return "MonotonicReads";
    case PredicateId::ReadYourWrites: return "ReadYourWrites";
    case PredicateId::MonotonicWrites: return "MonotonicWrites";
    case PredicateId::WritesFollowReads: return "WritesFollowReads";
    case PredicateId::CausalVisibility: return "CausalVisibility";
    case PredicateId::CausalArbitration: return "CausalArbitration";
    case PredicateId::StrongConvergence: return "StrongConvergence";
    case PredicateId::NoCircularCausality: return "NoCircularCausality";
    case PredicateId::EventualVisibility: return "EventualVisibility";
    case PredicateId::Quiescent: return "Quiescent";
    case PredicateId::TimedVisibility: return "TimedVisibility";
    case PredicateId::NoJoin: return "NoJoin";
    case PredicateId::AtMostOneJoin: return "AtMostOneJoin";
    case PredicateId::PerObjectPRAM: return "PerObjectPRAM";
    case PredicateId::PerObjectSingleOrder: return "PerObjectSingleOrder";
    case PredicateId::RVal: return "RVal";
    case PredicateId::SeqRVal: return "SeqRVal";
  }
  return "?";
}

inline std::optional<PredicateId> predicate_by_name(std::string_view name) {
  for (auto p : all_predicates)
    if (predicate_name(p) == name) return p;
  return std::nullopt;
}

/// User-supplied parameters, keyed by the public names delta, k_versions,
/// ev_slack, q_slack and rdt.
struct ModelParams {
  std::optional<std::uint64_t> delta;
  std::optional<std::uint64_t> k_versions;
  std::optional<std::uint64_t> ev_slack;
  std::optional<std::uint64_t> q_slack;
  std::optional<std::string> rdt;
  /// Evaluate K-RealTimeReads by the literal quantifier instead of the
  /// "latest K versions" reading. Library-only switch.
  bool k_reads_literal = false;
};

struct ModelDefinition {
  std::string name;
  std::vector<PredicateId> predicates;
  /// Causal predicates use hbo = ((so ∩ ob) ∪ vis)⁺ instead of hb.
  bool per_object_hb = false;

  bool has(PredicateId p) const {
    for (auto q : predicates)
      if (q == p) return true;
    return false;
  }
  bool needs_delta() const { return has(PredicateId::TimedVisibility); }
  bool needs_k() const { return has(PredicateId::KRealTimeReads); }
  bool takes_ev_slack() const { return has(PredicateId::EventualVisibility); }
  bool takes_q_slack() const { return has(PredicateId::Quiescent); }
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model with every parameter bound.
struct BoundModel {
  ModelDefinition def;
  std::uint64_t delta = 0;
  std::uint64_t k = 1;
  std::uint64_t ev_slack = 0;
  std::uint64_t q_slack = 0;
  RdtSpec rdt = register_rdt();
  bool k_reads_literal = false;
};

inline BoundModel bind(const ModelDefinition& def, const ModelParams& p) {
  BoundModel m;
  m.def = def;
  if (def.needs_delta()) {
    if (!p.delta) throw ModelError(def.name + " requires parameter delta");
    m.delta = *p.delta;
  } else if (p.delta) {
    throw ModelError(def.name + " does not take parameter delta");
  }
  if (def.needs_k()) {
    if (!p.k_versions) throw ModelError(def.name + " requires parameter k_versions");
    if (*p.k_versions < 1) throw ModelError("k_versions must be at least 1");
    m.k = *p.k_versions;
  } else if (p.k_versions) {
    throw ModelError(def.name + " does not take parameter k_versions");
  }
  if (p.ev_slack && !def.takes_ev_slack())
    throw ModelError(def.name + " does not take parameter ev_slack");
  if (p.q_slack && !def.takes_q_slack())
    throw ModelError(def.name + " does not take parameter q_slack");
  m.ev_slack = p.ev_slack.value_or(0);
  m.q_slack = p.q_slack.value_or(0);
  try {
    m.rdt = rdt_by_name(p.rdt.value_or("register"));
  } catch (const std::invalid_argument& e) {
    throw ModelError(e.what());
  }
  m.k_reads_literal = p.k_reads_literal;
  return m;
}

struct PredicateResult {
  PredicateResult() = default;
  explicit PredicateResult(PredicateId p) : id(p) {}

  PredicateId id = PredicateId::RVal;
  bool holds = true;
  /// Smallest violating operation pair (or single operation) by position.
  std::vector<std::size_t> evidence;
};

struct Verdict {
  std::vector<PredicateResult> results;
  bool overall = true;
};

namespace detail {

/// Lazily computed relations shared by several predicates of one model.
class EvalCache {
 public:
  EvalCache(const AbstractExecution& a, bool per_object) : a_(a), per_object_(per_object) {}
  const Relation& hb() {
    if (!hb_) hb_ = per_object_ ? per_object_happens_before(a_) : happens_before(a_);
    return *hb_;
  }

 private:
  const AbstractExecution& a_;
  bool per_object_;
  std::optional<Relation> hb_;
};

inline PredicateResult subset_result(PredicateId id, const Relation& r1, const Relation& r2) {
  PredicateResult r{id};
  if (auto m = first_missing(r1, r2)) {
    r.holds = false;
    r.evidence = {m->first, m->second};
  }
  return r;
}

/// Shared body of SingleOrder and its per-object variant: every operation's
/// vis row equals its ar row, except pending operations whose vis row is empty.
inline PredicateResult single_order(PredicateId id, const AbstractExecution& a, bool per_object) {
  const auto& h = a.history();
  const auto n = h.size();
  PredicateResult r{id};
  for (std::size_t x = 0; x < n; ++x) {
    std::optional<std::size_t> diff;
    bool vis_row_empty = true;
    for (std::size_t y = 0; y < n; ++y) {
      if (per_object && h.obj_index(x) != h.obj_index(y)) continue;
      bool v = a.vis().contains(x, y);
      bool o = x != y && a.ar_before(x, y);
      if (v) vis_row_empty = false;
      if (v != o && !diff) diff = y;
    }
    if (!diff) continue;
    if (h.pending(x) && vis_row_empty) continue;
    r.holds = false;
    r.evidence = {x, *diff};
    return r;
  }
  return r;
}

inline PredicateResult k_realtime(PredicateId id, const AbstractExecution& a, std::uint64_t k,
                                  bool literal, bool all_ops) {
  const auto& h = a.history();
  const auto n = h.size();
  const auto& rb = h.rb();
  PredicateResult r{id};
  for (std::size_t x = 0; x < n; ++x) {
    if (!all_ops && !h.is_write(x)) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (!all_ops && !h.is_read(y)) continue;
      if (!rb.contains(x, y) || a.ar_before(x, y)) continue;
      std::uint64_t between = 0;
      for (std::size_t w = 0; w < n; ++w) {
        if (!all_ops && !h.is_write(w)) continue;
        if (a.ar_before(x, w) && rb.contains(w, y)) ++between;
      }
      bool forced = literal ? (k >= 2 && between >= 1) : (between + 1 >= k);
      if (forced) {
        r.holds = false;
        r.evidence = {x, y};
        return r;
      }
    }
  }
  return r;
}

inline PredicateResult strong_convergence(const AbstractExecution& a) {
  const auto& h = a.history();
  const auto n = h.size();
  PredicateResult r{PredicateId::StrongConvergence};
  auto visible_writes = [&](std::size_t x) {
    std::vector<std::size_t> out;
    for (auto w : a.vis().predecessors(x))
      if (h.is_write(w) && h.obj_index(w) == h.obj_index(x)) out.push_back(w);
    return out;
  };
  std::vector<std::vector<std::size_t>> vw(n);
  for (std::size_t x = 0; x < n; ++x)
    if (h.is_read(x) && !h.pending(x)) vw[x] = visible_writes(x);
  for (std::size_t x = 0; x < n; ++x) {
    if (!h.is_read(x) || h.pending(x)) continue;
    for (std::size_t y = x + 1; y < n; ++y) {
      if (!h.is_read(y) || h.pending(y) || h.obj_index(x) != h.obj_index(y)) continue;
      if (vw[x] == vw[y] && *h.op(x).oval != *h.op(y).oval) {
        r.holds = false;
        r.evidence = {x, y};
        return r;
      }
    }
  }
  return r;
}

inline PredicateResult no_circular_causality(EvalCache& cache, std::size_t n) {
  PredicateResult r{PredicateId::NoCircularCausality};
  const auto& hb = cache.hb();
  for (std::size_t x = 0; x < n; ++x) {
    if (!hb.contains(x, x)) continue;
    r.holds = false;
    for (std::size_t y = 0; y < n; ++y)
      if (hb.contains(x, y) && hb.contains(y, x)) {
        r.evidence = {x, y};
        break;
      }
    return r;
  }
  return r;
}

inline PredicateResult eventual_visibility(const AbstractExecution& a, std::uint64_t slack) {
  const auto& h = a.history();
  const auto n = h.size();
  PredicateResult r{PredicateId::EventualVisibility};
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<std::uint64_t> missing(h.proc_count(), 0);
    for (std::size_t y = 0; y < n; ++y) {
      if (!h.rb().contains(x, y) || a.vis().contains(x, y)) continue;
      if (++missing[h.proc_index(y)] > slack) {
        r.holds = false;
        r.evidence = {x, y};
        return r;
      }
    }
  }
  return r;
}

/// The value the register would hold once every write is visible: the
/// ar-latest returning write on the object, or ⊥.
inline Value final_register_value(const AbstractExecution& a, std::size_t obj) {
  const auto& h = a.history();
  for (auto it = a.ar_sequence().rbegin(); it != a.ar_sequence().rend(); ++it)
    if (h.is_write(*it) && !h.pending(*it) && h.obj_index(*it) == obj) return h.op(*it).ival;
  return Value::bottom();
}

inline PredicateResult quiescent(const AbstractExecution& a, const BoundModel& m) {
  const auto& h = a.history();
  const auto n = h.size();
  PredicateResult r{PredicateId::Quiescent};
  if (n == 0) return r;
  std::optional<std::size_t> sink;
  for (std::size_t c = 0; c < n && !sink; ++c) {
    bool all = true;
    for (std::size_t w = 0; w < n && all; ++w)
      if (h.is_write(w) && w != c && !a.vis().contains(w, c)) all = false;
    if (all) sink = c;
  }
  if (!sink) {
    r.holds = false;
    return r;
  }
  std::vector<std::uint64_t> off(h.proc_count(), 0);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& op = h.op(x);
    if (op.pending() || !m.rdt.checked(op)) continue;
    bool ok;
    if (m.rdt.kind == RdtKind::register_) {
      ok = *op.oval == final_register_value(a, h.obj_index(x));
    } else {
      // Evaluate F against the execution in which every write is visible.
      Relation all_vis(n);
      for (std::size_t w = 0; w < n; ++w)
        if (h.is_write(w) && w != x) all_vis.insert(w, x);
      AbstractExecution full(a.history_ptr(), all_vis, a.ar());
      auto vals = rval_set(m.rdt, full, x);
      ok = std::find(vals.begin(), vals.end(), *op.oval) != vals.end();
    }
    if (!ok && ++off[h.proc_index(x)] > m.q_slack) {
      r.holds = false;
      r.evidence = {*sink, x};
      return r;
    }
  }
  return r;
}

inline PredicateResult timed_visibility(const AbstractExecution& a, std::uint64_t delta) {
  const auto& h = a.history();
  const auto n = h.size();
  PredicateResult r{PredicateId::TimedVisibility};
  for (std::size_t x = 0; x < n; ++x) {
    if (!h.is_write(x) || h.pending(x)) continue;
    const auto deadline = *h.op(x).rtime + delta;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || h.op(y).stime < deadline || a.vis().contains(x, y)) continue;
      r.holds = false;
      r.evidence = {x, y};
      return r;
    }
  }
  return r;
}

/// NoJoin (limit 0) and AtMostOneJoin (limit 1), with ⪯so = so ∪ id.
inline PredicateResult join_limit(PredicateId id, const AbstractExecution& a, std::size_t limit) {
  const auto& h = a.history();
  const auto n = h.size();
  const auto& so = h.so();
  const auto& vis = a.vis();
  PredicateResult r{id};
  auto tail = [&](std::size_t x) {
    std::vector<std::size_t> t{x};
    for (auto y : so.successors(x)) t.push_back(y);
    return t;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (h.proc_index(i) == h.proc_index(j)) continue;
      if (!a.ar_before(i, j) || vis.contains(i, j)) continue;
      auto si = tail(i);
      auto sj = tail(j);
      auto joined = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
        std::size_t count = 0;
        for (auto b : from)
          for (auto c : to)
            if (vis.contains(b, c)) {
              ++count;
              break;
            }
        return count;
      };
      if (joined(si, sj) > limit || joined(sj, si) > limit) {
        r.holds = false;
        r.evidence = {i, j};
        return r;
      }
    }
  }
  return r;
}

inline PredicateResult rval(PredicateId id, const AbstractExecution& a, const RdtSpec& rdt) {
  PredicateResult r{id};
  if (auto v = rval_violation(rdt, a, id == PredicateId::SeqRVal)) {
    r.holds = false;
    r.evidence = {*v};
  }
  return r;
}

inline PredicateResult evaluate(PredicateId p, const AbstractExecution& a, const BoundModel& m,
                                EvalCache& cache) {
  const auto& h = a.history();
  switch (p) {
    case PredicateId::SingleOrder: return single_order(p, a, false);
    case PredicateId::PerObjectSingleOrder: return single_order(p, a, true);
    case PredicateId::RealTime: return subset_result(p, h.rb(), a.ar());
    case PredicateId::RealTimeWrites:
      return subset_result(p, restrict(h.rb(), h, KindFilter::write, KindFilter::any), a.ar());
    case PredicateId::RealTimeWW:
      return subset_result(p, restrict(h.rb(), h, KindFilter::write, KindFilter::write), a.ar());
    case PredicateId::KRealTimeReads: return k_realtime(p, a, m.k, m.k_reads_literal, false);
    case PredicateId::KRealTime: return k_realtime(p, a, 2, m.k_reads_literal, true);
    case PredicateId::PRAM: return subset_result(p, h.so(), a.vis());
    case PredicateId::MonotonicReads:
      return subset_result(
          p, compose(a.vis(), restrict(h.so(), h, KindFilter::read, KindFilter::read)), a.vis());
    case PredicateId::ReadYourWrites:
      return subset_result(p, restrict(h.so(), h, KindFilter::write, KindFilter::read), a.vis());
    case PredicateId::MonotonicWrites:
      return subset_result(p, restrict(h.so(), h, KindFilter::write, KindFilter::write), a.ar());
    case PredicateId::WritesFollowReads:
      return subset_result(
          p, compose(a.vis(), restrict(h.so(), h, KindFilter::read, KindFilter::write)), a.ar());
    case PredicateId::CausalVisibility: return subset_result(p, cache.hb(), a.vis());
    case PredicateId::CausalArbitration: return subset_result(p, cache.hb(), a.ar());
    case PredicateId::StrongConvergence: return strong_convergence(a);
    case PredicateId::NoCircularCausality: return no_circular_causality(cache, h.size());
    case PredicateId::EventualVisibility: return eventual_visibility(a, m.ev_slack);
    case PredicateId::Quiescent: return quiescent(a, m);
    case PredicateId::TimedVisibility: return timed_visibility(a, m.delta);
    case PredicateId::NoJoin: return join_limit(p, a, 0);
    case PredicateId::AtMostOneJoin: return join_limit(p, a, 1);
    case PredicateId::PerObjectPRAM: return subset_result(p, h.so() & h.ob(), a.vis());
    case PredicateId::RVal:
    case PredicateId::SeqRVal: return rval(p, a, m.rdt);
  }
  throw std::logic_error("unhandled predicate");
}

}  // namespace detail

/// Evaluates one predicate on a concrete execution. Parameters not used by
/// the predicate are ignored; causal predicates use hb.
inline PredicateResult evaluate_predicate(PredicateId p, const AbstractExecution& a,
                                          const BoundModel& m) {
  detail::EvalCache cache(a, m.def.per_object_hb);
  return detail::evaluate(p, a, m, cache);
}

inline PredicateResult evaluate_predicate(PredicateId p, const AbstractExecution& a) {
  BoundModel m;
  m.def.predicates = {p};
  return evaluate_predicate(p, a, m);
}

/// Evaluates every member predicate of the model.
inline Verdict evaluate_model(const AbstractExecution& a, const BoundModel& m) {
  Verdict v;
  detail::EvalCache cache(a, m.def.per_object_hb);
  for (auto p : m.def.predicates) {
    v.results.push_back(detail::evaluate(p, a, m, cache));
    v.overall = v.overall && v.results.back().holds;
  }
  return v;
}

/// Conjunction with early exit; same answer as evaluate_model(...).overall.
inline bool satisfies(const AbstractExecution& a, const BoundModel& m) {
  detail::EvalCache cache(a, m.def.per_object_hb);
  for (auto p : m.def.predicates)
    if (!detail::evaluate(p, a, m, cache).holds) return false;
  return true;
}

}  // namespace conscheck

#endif  // CONSCHECK_PREDICATES_HPP
