#pragma once
#ifndef CONSCHECK_RDT_HPP
#define CONSCHECK_RDT_HPP

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "execution.hpp"

namespace conscheck {

/// What one operation can see: its visible operations, with vis and ar
/// projected onto those operations plus the focal one.
struct Context {
  std::size_t focal = 0;
  std::vector<std::size_t> visible;   // vis⁻¹(focal), increasing position
  Relation vis;                       // vis restricted to visible ∪ {focal}
  std::vector<std::size_t> ar_order;  // visible ∪ {focal}, in arbitration order

  bool contains(std::size_t i) const {
    return i == focal || std::binary_search(visible.begin(), visible.end(), i);
  }
};

inline Context context_of(const AbstractExecution& a, std::size_t op) {
  if (op >= a.size()) throw std::out_of_range("operation index outside the execution");
  Context c;
  c.focal = op;
  c.visible = a.vis().predecessors(op);
  c.vis = Relation(a.size());
  for (auto x : c.visible) {
    c.vis.insert(x, op);
    for (auto y : c.visible)
      if (a.vis().contains(x, y)) c.vis.insert(x, y);
  }
  for (auto x : a.ar_sequence())
    if (c.contains(x)) c.ar_order.push_back(x);
  return c;
}

inline Context context_of(const AbstractExecution& a, OpId op) {
  return context_of(a, a.history().require_index(op));
}

/// The ar-latest returning write on op's object that op can see, or nullopt
/// (standing for ⊥) when there is none.
inline std::optional<std::size_t> prec(const AbstractExecution& a, std::size_t op) {
  const auto& h = a.history();
  std::optional<std::size_t> best;
  for (auto w : a.vis().predecessors(op)) {
    if (!h.is_write(w) || h.pending(w) || h.obj_index(w) != h.obj_index(op)) continue;
    if (!best || a.ar_before(*best, w)) best = w;
  }
  return best;
}

enum class RdtKind { register_, counter, custom };

/// A replicated data type: which operations have their outputs constrained,
/// and the set of intended outputs given a context.
struct RdtSpec {
  std::string name;
  RdtKind kind = RdtKind::register_;
  std::function<bool(const Operation&)> checked;
  std::function<std::vector<Value>(const AbstractExecution&, std::size_t, const Context&)> intended;
};

namespace detail {

inline std::vector<Value> register_values(const AbstractExecution& a, std::size_t op) {
  auto p = prec(a, op);
  return {p ? a.history().op(*p).ival : Value::bottom()};
}

inline std::vector<Value> counter_values(const AbstractExecution& a, std::size_t op) {
  const auto& h = a.history();
  std::int64_t n = 0;
  for (auto w : a.vis().predecessors(op))
    if (h.op(w).type == "inc" && !h.pending(w) && h.obj_index(w) == h.obj_index(op)) ++n;
  return {Value(n)};
}

}  // namespace detail

/// Register: reads return the value of prec, or ⊥.
inline RdtSpec register_rdt() {
  return RdtSpec{"register", RdtKind::register_,
                 [](const Operation& op) { return op.is_read(); },
                 [](const AbstractExecution& a, std::size_t op, const Context&) {
                   return detail::register_values(a, op);
                 }};
}

/// Counter: reads return the number of visible returning increments.
inline RdtSpec counter_rdt() {
  return RdtSpec{"counter", RdtKind::counter,
                 [](const Operation& op) { return op.is_read(); },
                 [](const AbstractExecution& a, std::size_t op, const Context&) {
                   return detail::counter_values(a, op);
                 }};
}

inline RdtSpec rdt_by_name(const std::string& name) {
  if (name == "register") return register_rdt();
  if (name == "counter") return counter_rdt();
  throw std::invalid_argument("unknown replicated data type '" + name + "'");
}

inline std::vector<Value> rval_set(const RdtSpec& spec, const AbstractExecution& a,
                                   std::size_t op, const Context& ctx) {
  auto vals = spec.intended(a, op, ctx);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

inline std::vector<Value> rval_set(const RdtSpec& spec, const AbstractExecution& a,
                                   std::size_t op) {
  return rval_set(spec, a, op, context_of(a, op));
}

/// Whether one operation's output is among its intended values. Pending and
/// unchecked operations pass.
inline bool rval_holds_at(const RdtSpec& spec, const AbstractExecution& a, std::size_t op) {
  const auto& o = a.history().op(op);
  if (o.pending() || !spec.checked(o)) return true;
  std::vector<Value> vals;
  switch (spec.kind) {
    case RdtKind::register_: vals = detail::register_values(a, op); break;
    case RdtKind::counter: vals = detail::counter_values(a, op); break;
    case RdtKind::custom: vals = rval_set(spec, a, op); break;
  }
  return std::find(vals.begin(), vals.end(), *o.oval) != vals.end();
}

/// First operation (by position) whose output is not intended, if any.
inline std::optional<std::size_t> rval_violation(const RdtSpec& spec, const AbstractExecution& a,
                                                 bool sequential_only) {
  const auto& h = a.history();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (sequential_only && !concur_writes(h, i).empty()) continue;
    if (!rval_holds_at(spec, a, i)) return i;
  }
  return std::nullopt;
}

inline bool rval_predicate(const AbstractExecution& a, const RdtSpec& spec) {
  return !rval_violation(spec, a, false).has_value();
}

/// RVal restricted to operations no write overlaps.
inline bool seq_rval_predicate(const AbstractExecution& a, const RdtSpec& spec) {
  return !rval_violation(spec, a, true).has_value();
}

}  // namespace conscheck

#endif  // CONSCHECK_RDT_HPP
