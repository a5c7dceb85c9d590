#pragma once
#ifndef CONSCHECK_HISTORY_HPP
#define CONSCHECK_HISTORY_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relation.hpp"

namespace conscheck {

struct OpId {
  std::uint64_t value = 0;
  friend auto operator<=>(const OpId&, const OpId&) = default;
};

inline std::string to_string(OpId id) { return std::to_string(id.value); }

/// ⊥, the value of an object nobody has written yet.
struct Bottom {
  friend auto operator<=>(const Bottom&, const Bottom&) = default;
};
/// ⊔, the input argument carried by reads.
struct Placeholder {
  friend auto operator<=>(const Placeholder&, const Placeholder&) = default;
};

/// An operation value: one of the two reserved tokens, an integer or a short
/// string. The reserved tokens never compare equal to domain values.
class Value {
 public:
  Value() : v_(Bottom{}) {}
  Value(Bottom b) : v_(b) {}
  Value(Placeholder p) : v_(p) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}

  static Value bottom() { return Value(Bottom{}); }
  static Value placeholder() { return Value(Placeholder{}); }

  bool is_bottom() const { return std::holds_alternative<Bottom>(v_); }
  bool is_placeholder() const { return std::holds_alternative<Placeholder>(v_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_concrete() const { return is_int() || is_text(); }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }

  std::string to_string() const {
    if (is_bottom()) return "⊥";
    if (is_placeholder()) return "⊔";
    if (is_int()) return std::to_string(as_int());
    return as_text();
  }

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  std::variant<Bottom, Placeholder, std::int64_t, std::string> v_;
};

enum class OpKind { read, write, other };

/// Classification used by the relation projections. "inc" counts as a write
/// so counter histories reuse the same machinery.
inline OpKind kind_of_type(const std::string& type) {
  if (type == "rd") return OpKind::read;
  if (type == "wr" || type == "inc") return OpKind::write;
  return OpKind::other;
}

/// One invocation/response pair. A pending operation has neither an output
/// value nor a return time.
struct Operation {
  OpId id;
  std::string proc;
  std::string type;
  std::string obj;
  Value ival = Value::placeholder();
  std::optional<Value> oval;
  std::uint64_t stime = 0;
  std::optional<std::uint64_t> rtime;

  OpKind kind() const { return kind_of_type(type); }
  bool is_read() const { return kind() == OpKind::read; }
  bool is_write() const { return kind() == OpKind::write; }
  bool pending() const { return !rtime.has_value(); }

  static Operation write(std::uint64_t id, std::string proc, std::string obj, Value v,
                         std::uint64_t stime, std::optional<std::uint64_t> rtime) {
    Operation op{OpId{id}, std::move(proc), "wr", std::move(obj), std::move(v),
                 std::nullopt, stime, rtime};
    if (rtime) op.oval = Value("ok");
    return op;
  }
  static Operation read(std::uint64_t id, std::string proc, std::string obj,
                        std::optional<Value> out, std::uint64_t stime,
                        std::optional<std::uint64_t> rtime) {
    return Operation{OpId{id}, std::move(proc), "rd", std::move(obj),
                     Value::placeholder(), std::move(out), stime, rtime};
  }

  friend bool operator==(const Operation&, const Operation&) = default;
};

class HistoryError : public std::invalid_argument {
 public:
  HistoryError(std::optional<OpId> id, const std::string& what)
      : std::invalid_argument(id ? "operation " + to_string(*id) + ": " + what : what),
        id_(id) {}
  std::optional<OpId> op_id() const { return id_; }

 private:
  std::optional<OpId> id_;
};

/// A validated, immutable history. Operations are kept sorted by id and every
/// relation is indexed by position in that order.
class History {
 public:
  History() = default;

  std::size_t size() const noexcept { return ops_.size(); }
  bool empty() const noexcept { return ops_.empty(); }
  const std::vector<Operation>& ops() const noexcept { return ops_; }
  const Operation& op(std::size_t i) const { return ops_.at(i); }
  OpId id(std::size_t i) const { return ops_.at(i).id; }

  std::optional<std::size_t> index_of(OpId id) const {
    auto it = std::lower_bound(ops_.begin(), ops_.end(), id,
                               [](const Operation& o, OpId v) { return o.id < v; });
    if (it == ops_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - ops_.begin());
  }
  std::size_t require_index(OpId id) const {
    auto i = index_of(id);
    if (!i) throw HistoryError(id, "not in history");
    return *i;
  }

  OpKind kind(std::size_t i) const { return kinds_.at(i); }
  bool is_read(std::size_t i) const { return kinds_.at(i) == OpKind::read; }
  bool is_write(std::size_t i) const { return kinds_.at(i) == OpKind::write; }
  bool pending(std::size_t i) const { return ops_.at(i).pending(); }

  /// Dense process/object numbering in order of first appearance by id.
  std::size_t proc_index(std::size_t i) const { return proc_of_.at(i); }
  std::size_t obj_index(std::size_t i) const { return obj_of_.at(i); }
  std::size_t proc_count() const noexcept { return procs_.size(); }
  std::size_t obj_count() const noexcept { return objs_.size(); }
  const std::vector<std::string>& procs() const noexcept { return procs_; }
  const std::vector<std::string>& objects() const noexcept { return objs_; }

  const Relation& rb() const noexcept { return rb_; }
  const Relation& ss() const noexcept { return ss_; }
  const Relation& so() const noexcept { return so_; }
  const Relation& ob() const noexcept { return ob_; }
  const Relation& concur() const noexcept { return concur_; }

  friend History build_history(std::vector<Operation> ops);

 private:
  std::vector<Operation> ops_;
  std::vector<OpKind> kinds_;
  std::vector<std::size_t> proc_of_, obj_of_;
  std::vector<std::string> procs_, objs_;
  Relation rb_, ss_, so_, ob_, concur_;
};

/// Validates the operations and derives every history relation.
///
/// Throws HistoryError naming the offending operation on a duplicate id, a
/// return time before the invocation time, a pending marker present on only
/// one of oval/rtime, a read whose input is not ⊔, or a write without a
/// concrete input.
inline History build_history(std::vector<Operation> ops) {
  std::sort(ops.begin(), ops.end(),
            [](const Operation& a, const Operation& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < ops.size(); ++i)
    if (ops[i].id == ops[i - 1].id) throw HistoryError(ops[i].id, "duplicate id");
  for (const auto& op : ops) {
    if (op.oval.has_value() != op.rtime.has_value())
      throw HistoryError(op.id, "output value and return time must be absent together");
    if (op.rtime && *op.rtime < op.stime)
      throw HistoryError(op.id, "return time " + std::to_string(*op.rtime) +
                                    " precedes invocation time " + std::to_string(op.stime));
    if (op.is_read() && !op.ival.is_placeholder())
      throw HistoryError(op.id, "read input must be the placeholder");
    if (op.is_write() && !op.ival.is_concrete())
      throw HistoryError(op.id, "write input must be a concrete value");
    if (op.oval && op.oval->is_placeholder() && op.is_read())
      throw HistoryError(op.id, "read output cannot be the placeholder");
    if (op.proc.empty()) throw HistoryError(op.id, "empty process name");
    if (op.obj.empty()) throw HistoryError(op.id, "empty object name");
  }

  History h;
  const auto n = ops.size();
  h.ops_ = std::move(ops);
  h.kinds_.reserve(n);
  std::map<std::string, std::size_t> pidx, oidx;
  for (const auto& op : h.ops_) {
    h.kinds_.push_back(op.kind());
    auto [pit, pnew] = pidx.try_emplace(op.proc, h.procs_.size());
    if (pnew) h.procs_.push_back(op.proc);
    h.proc_of_.push_back(pit->second);
    auto [oit, onew] = oidx.try_emplace(op.obj, h.objs_.size());
    if (onew) h.objs_.push_back(op.obj);
    h.obj_of_.push_back(oit->second);
  }

  h.rb_ = Relation(n);
  h.ss_ = Relation(n);
  h.ob_ = Relation(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& x = h.ops_[a];
    for (std::size_t b = 0; b < n; ++b) {
      const auto& y = h.ops_[b];
      if (x.rtime && *x.rtime < y.stime) h.rb_.insert(a, b);
      if (h.proc_of_[a] == h.proc_of_[b]) h.ss_.insert(a, b);
      if (h.obj_of_[a] == h.obj_of_[b]) h.ob_.insert(a, b);
    }
  }
  h.so_ = h.rb_ & h.ss_;
  h.concur_ = h.ob_ - (h.rb_ | inverse(h.rb_) | Relation::identity(n));
  return h;
}

/// Writes on a's object that overlap a in real time.
inline std::vector<std::size_t> concur_writes(const History& h, std::size_t a) {
  if (a >= h.size()) throw HistoryError(std::nullopt, "operation index out of range");
  std::vector<std::size_t> out;
  for (auto b : h.concur().successors(a))
    if (h.is_write(b)) out.push_back(b);
  return out;
}

inline std::vector<std::size_t> concur_writes(const History& h, OpId a) {
  return concur_writes(h, h.require_index(a));
}

/// Endpoint filter for restrict(); `any` matches every operation.
enum class KindFilter { read, write, other, any };

inline bool kind_matches(OpKind k, KindFilter f) {
  switch (f) {
    case KindFilter::read: return k == OpKind::read;
    case KindFilter::write: return k == OpKind::write;
    case KindFilter::other: return k == OpKind::other;
    case KindFilter::any: return true;
  }
  return false;
}

/// r|from→to: the pairs of r whose source matches `from` and target `to`.
inline Relation restrict(const Relation& r, const History& h, KindFilter from, KindFilter to) {
  if (r.size() != h.size())
    throw std::invalid_argument("relation carrier does not match history");
  Relation out(r.size());
  for (const auto& [a, b] : r.pairs())
    if (kind_matches(h.kind(a), from) && kind_matches(h.kind(b), to)) out.insert(a, b);
  return out;
}

/// The sub-history made of the operations at the given positions (original ids).
inline History sub_history(const History& h, const std::vector<std::size_t>& keep) {
  std::vector<Operation> ops;
  ops.reserve(keep.size());
  for (auto i : keep) ops.push_back(h.op(i));
  return build_history(std::move(ops));
}

}  // namespace conscheck

#endif  // CONSCHECK_HISTORY_HPP
