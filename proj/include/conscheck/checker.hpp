#pragma once
#ifndef CONSCHECK_CHECKER_HPP
#define CONSCHECK_CHECKER_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "execution.hpp"
#include "models.hpp"
#include "predicates.hpp"
#include "rdt.hpp"

namespace conscheck {

enum class Outcome { Satisfied, Violated, Unknown };
enum class Completeness { exhaustive, restricted };

/// How the search space is organized for a model.
///
///   single_order      ar enumerated; vis = ar minus the rows of H′
///   per_object_order  as above, per object; cross-object vis from closure
///   seeded            per-read source writes, closed vis, least ar
///   quiescent         choice of the final write per object
///   fork              ar × sources × subsets of forward write edges
///   full              ar × every vis over the candidate edge set
enum class Strategy { trivial, single_order, per_object_order, seeded, quiescent, fork, full };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Satisfied: return "Satisfied";
    case Outcome::Violated: return "Violated";
    case Outcome::Unknown: return "Unknown";
  }
  return "?";
}
inline const char* to_string(Completeness c) {
  return c == Completeness::exhaustive ? "exhaustive" : "restricted";
}
inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::trivial: return "trivial";
    case Strategy::single_order: return "single-order";
    case Strategy::per_object_order: return "per-object-order";
    case Strategy::seeded: return "seeded";
    case Strategy::quiescent: return "quiescent";
    case Strategy::fork: return "fork";
    case Strategy::full: return "full";
  }
  return "?";
}

inline std::uint64_t default_budget() {
  if (const char* env = std::getenv("CONSCHECK_BUDGET")) {
    char* end = nullptr;
    auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 20'000'000;
}

struct CheckOptions {
  std::uint64_t budget = default_budget();
  /// Largest history for which the fork strategy enumerates the unrestricted
  /// vis space; the full strategy does so only up to 4 operations.
  std::size_t exhaustive_bound = 6;
  /// Ignore the model-specific strategy and enumerate orders and visibility
  /// relations directly. Only meaningful for tiny histories.
  bool force_full = false;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t prunes = 0;
  std::uint64_t candidates = 0;
  friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

struct SearchConstraints {
  Relation mandatory_ar;
  Relation mandatory_vis;
  std::vector<std::size_t> h_prime_eligible;
  Strategy strategy = Strategy::trivial;
};

struct CheckResult {
  Outcome outcome = Outcome::Unknown;
  std::optional<AbstractExecution> witness;
  std::vector<std::size_t> h_prime;
  /// Positions of operations implicated in a violation (a cycle when the
  /// mandatory constraints are already contradictory).
  std::vector<std::size_t> evidence;
  std::string reason;
  SearchStats stats;
  Completeness completeness = Completeness::exhaustive;
  Strategy strategy = Strategy::trivial;
};

namespace detail {

inline bool in_set(std::initializer_list<PredicateId> s, PredicateId p) {
  return std::find(s.begin(), s.end(), p) != s.end();
}

/// Predicates that either require edges to be present (closures) or forbid
/// them, at fixed ar: for such models the least closed vis containing the
/// chosen reads-from edges is always the best candidate.
inline bool seedable(const BoundModel& m) {
  using P = PredicateId;
  if (m.rdt.kind == RdtKind::custom) return false;
  bool has_rval = m.def.has(P::RVal);
  for (auto p : m.def.predicates) {
    if (p == P::StrongConvergence && !has_rval) return false;
    if (!in_set({P::RealTime, P::RealTimeWrites, P::RealTimeWW, P::KRealTimeReads, P::PRAM,
                 P::MonotonicReads, P::ReadYourWrites, P::MonotonicWrites, P::WritesFollowReads,
                 P::CausalVisibility, P::CausalArbitration, P::StrongConvergence,
                 P::NoCircularCausality, P::EventualVisibility, P::TimedVisibility,
                 P::PerObjectPRAM, P::RVal, P::SeqRVal},
                p))
      return false;
  }
  return true;
}

inline Strategy choose_strategy(const History& h, const BoundModel& m) {
  using P = PredicateId;
  if (h.empty()) return Strategy::trivial;
  if (m.def.has(P::SingleOrder)) return Strategy::single_order;
  if (m.def.has(P::PerObjectSingleOrder)) return Strategy::per_object_order;
  if (m.def.has(P::NoJoin) || m.def.has(P::AtMostOneJoin))
    return h.size() <= 4 ? Strategy::full : Strategy::fork;
  if (m.def.predicates == std::vector<P>{P::Quiescent} && m.rdt.kind != RdtKind::custom)
    return Strategy::quiescent;
  if (seedable(m)) return Strategy::seeded;
  return Strategy::full;
}

}  // namespace detail

/// Edges every witness must contain, derived from the model's predicates.
inline SearchConstraints derive_constraints(const History& h, const BoundModel& m) {
  using P = PredicateId;
  using KF = KindFilter;
  const auto n = h.size();
  SearchConstraints c;
  c.mandatory_ar = Relation(n);
  c.mandatory_vis = Relation(n);
  c.strategy = detail::choose_strategy(h, m);
  const Relation so_hb = m.def.per_object_hb ? (h.so() & h.ob()) : h.so();

  if (m.def.has(P::PRAM)) c.mandatory_vis |= h.so();
  if (m.def.has(P::CausalVisibility)) c.mandatory_vis |= so_hb;
  if (m.def.has(P::ReadYourWrites)) c.mandatory_vis |= restrict(h.so(), h, KF::write, KF::read);
  if (m.def.has(P::PerObjectPRAM)) c.mandatory_vis |= h.so() & h.ob();
  if (m.def.has(P::EventualVisibility) && m.ev_slack == 0) c.mandatory_vis |= h.rb();
  if (m.def.has(P::TimedVisibility)) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!h.is_write(a) || h.pending(a)) continue;
      for (std::size_t b = 0; b < n; ++b)
        if (b != a && h.op(b).stime >= *h.op(a).rtime + m.delta) c.mandatory_vis.insert(a, b);
    }
  }

  if (m.def.has(P::RealTime)) c.mandatory_ar |= h.rb();
  if (m.def.has(P::RealTimeWrites)) c.mandatory_ar |= restrict(h.rb(), h, KF::write, KF::any);
  if (m.def.has(P::RealTimeWW)) c.mandatory_ar |= restrict(h.rb(), h, KF::write, KF::write);
  if (m.def.has(P::KRealTimeReads) && m.k == 1 && !m.k_reads_literal)
    c.mandatory_ar |= restrict(h.rb(), h, KF::write, KF::read);
  if (m.def.has(P::MonotonicWrites)) c.mandatory_ar |= restrict(h.so(), h, KF::write, KF::write);
  if (m.def.has(P::CausalArbitration)) c.mandatory_ar |= so_hb;
  if (m.def.has(P::CausalArbitration)) c.mandatory_ar |= c.mandatory_vis;
  if (c.strategy == Strategy::single_order) c.mandatory_ar |= c.mandatory_vis;
  if (c.strategy == Strategy::per_object_order) c.mandatory_ar |= c.mandatory_vis & h.ob();

  for (std::size_t i = 0; i < n; ++i)
    if (h.pending(i)) c.h_prime_eligible.push_back(i);
  return c;
}

namespace detail {

struct BudgetExceeded {};

/// Reads-from bookkeeping shared by the order-based searches: the value a
/// checked read must observe given the returning writes placed before it.
class ReadValueTracker {
 public:
  ReadValueTracker(const History& h, const BoundModel& m, bool seq_only)
      : h_(h), kind_(m.rdt.kind), last_(h.obj_count()), count_(h.obj_count(), 0) {
    checked_.assign(h.size(), false);
    if (kind_ == RdtKind::custom) return;
    bool constrained = m.def.has(PredicateId::RVal) || m.def.has(PredicateId::SeqRVal);
    if (!constrained) return;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto& op = h.op(i);
      if (op.pending() || !m.rdt.checked(op)) continue;
      if (seq_only && !concur_writes(h, i).empty()) continue;
      checked_[i] = true;
    }
  }

  /// False when placing `i` next contradicts its output value.
  bool admits(std::size_t i) const {
    if (!checked_[i]) return true;
    const auto& out = *h_.op(i).oval;
    auto obj = h_.obj_index(i);
    if (kind_ == RdtKind::counter) return out == Value(count_[obj]);
    return last_[obj] ? h_.op(*last_[obj]).ival == out : out.is_bottom();
  }

  void push(std::size_t i) {
    undo_.emplace_back(i, last_[h_.obj_index(i)]);
    if (!h_.is_write(i) || h_.pending(i)) return;
    auto obj = h_.obj_index(i);
    if (kind_ == RdtKind::counter) {
      if (h_.op(i).type == "inc") ++count_[obj];
    } else {
      last_[obj] = i;
    }
  }
  void pop() {
    auto [i, prev] = undo_.back();
    undo_.pop_back();
    if (!h_.is_write(i) || h_.pending(i)) return;
    auto obj = h_.obj_index(i);
    if (kind_ == RdtKind::counter) {
      if (h_.op(i).type == "inc") --count_[obj];
    } else {
      last_[obj] = prev;
    }
  }

 private:
  const History& h_;
  RdtKind kind_;
  std::vector<bool> checked_;
  std::vector<std::optional<std::size_t>> last_;
  std::vector<std::int64_t> count_;
  std::vector<std::pair<std::size_t, std::optional<std::size_t>>> undo_;
};

/// Positions sorted by (stime, position), the tie-break order of every search.
inline std::vector<std::size_t> time_order(const History& h) {
  std::vector<std::size_t> order(h.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return h.op(a).stime < h.op(b).stime;
  });
  return order;
}

/// Depth-first enumeration of the linear extensions of a precedence relation,
/// with an optional per-step admission test.
class ExtensionWalker {
 public:
  using Admit = std::function<bool(std::size_t)>;
  using Push = std::function<void(std::size_t)>;
  using Pop = std::function<void()>;
  using Leaf = std::function<bool(const std::vector<std::size_t>&)>;

  ExtensionWalker(const History& h, const Relation& prec, SearchStats& stats,
                  std::uint64_t budget)
      : prec_(prec), order_(time_order(h)), stats_(stats), budget_(budget) {
    const auto n = h.size();
    indeg_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (auto b : prec.successors(a)) ++indeg_[b];
    placed_.assign(n, false);
  }

  /// Returns true when `leaf` asked to stop.
  bool run(const Admit& admit, const Push& push, const Pop& pop, const Leaf& leaf) {
    seq_.clear();
    return step(admit, push, pop, leaf);
  }

 private:
  bool step(const Admit& admit, const Push& push, const Pop& pop, const Leaf& leaf) {
    if (++stats_.nodes > budget_) throw BudgetExceeded{};
    if (seq_.size() == order_.size()) return leaf(seq_);
    for (auto i : order_) {
      if (placed_[i] || indeg_[i] != 0) continue;
      if (admit && !admit(i)) {
        ++stats_.prunes;
        continue;
      }
      placed_[i] = true;
      seq_.push_back(i);
      for (auto b : prec_.successors(i)) --indeg_[b];
      if (push) push(i);
      bool stop = step(admit, push, pop, leaf);
      if (pop) pop();
      for (auto b : prec_.successors(i)) ++indeg_[b];
      seq_.pop_back();
      placed_[i] = false;
      if (stop) return true;
    }
    return false;
  }

  const Relation& prec_;
  std::vector<std::size_t> order_;
  SearchStats& stats_;
  std::uint64_t budget_;
  std::vector<std::size_t> indeg_;
  std::vector<bool> placed_;
  std::vector<std::size_t> seq_;
};

/// Least linear extension of an acyclic precedence under the time order.
inline std::vector<std::size_t> least_extension(const History& h, const Relation& prec) {
  const auto n = h.size();
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (auto b : prec.successors(a)) ++indeg[b];
  auto order = time_order(h);
  std::vector<bool> placed(n, false);
  std::vector<std::size_t> seq;
  while (seq.size() < n) {
    bool progressed = false;
    for (auto i : order) {
      if (placed[i] || indeg[i] != 0) continue;
      placed[i] = true;
      seq.push_back(i);
      for (auto b : prec.successors(i)) --indeg[b];
      progressed = true;
      break;
    }
    if (!progressed) throw std::logic_error("precedence relation is cyclic");
  }
  return seq;
}

/// vis = ar \ (H′ × H), or its per-object analogue.
inline Relation order_vis(const History& h, const std::vector<std::size_t>& seq,
                          const std::vector<bool>& in_h_prime, bool per_object) {
  const auto n = h.size();
  Relation vis(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (in_h_prime[seq[i]]) continue;
    for (std::size_t j = i + 1; j < n; ++j)
      if (!per_object || h.obj_index(seq[i]) == h.obj_index(seq[j])) vis.insert(seq[i], seq[j]);
  }
  return vis;
}

/// Smallest relation containing vis that satisfies the closure predicates of
/// the model (CausalVisibility, MonotonicReads).
inline Relation close_vis(const BoundModel& m, Relation vis,
                          const Relation& so_hb, const Relation& so_rr) {
  const bool cv = m.def.has(PredicateId::CausalVisibility);
  const bool mr = m.def.has(PredicateId::MonotonicReads);
  if (!cv && !mr) return vis;
  for (;;) {
    Relation next = vis;
    if (cv) next |= transitive_closure(so_hb | next);
    if (mr) next |= compose(next, so_rr);
    if (next == vis) return vis;
    vis = std::move(next);
  }
}

}  // namespace detail

/// Visitor over candidate executions; return true to stop the enumeration.
using ExtensionVisitor =
    std::function<bool(const AbstractExecution&, const std::vector<std::size_t>& h_prime)>;

namespace detail {

class Engine {
 public:
  Engine(const History& h, const BoundModel& m, const CheckOptions& opt, bool prune)
      : h_(h),
        hp_(std::make_shared<const History>(h)),
        m_(m),
        opt_(opt),
        prune_(prune),
        c_(derive_constraints(h, m)) {
    so_hb_ = m.def.per_object_hb ? (h.so() & h.ob()) : h.so();
    so_rr_ = restrict(h.so(), h, KindFilter::read, KindFilter::read);
    so_rw_ = restrict(h.so(), h, KindFilter::read, KindFilter::write);
    if (opt.force_full && !h.empty()) c_.strategy = Strategy::full;
  }

  const SearchConstraints& constraints() const { return c_; }
  SearchStats& stats() { return stats_; }

  /// Runs the strategy, handing each candidate to `visit`. Returns true if
  /// the visitor stopped the search.
  bool run(const ExtensionVisitor& visit, Completeness& completeness) {
    completeness = Completeness::exhaustive;
    switch (c_.strategy) {
      case Strategy::trivial: {
        AbstractExecution a(hp_, Relation(0), Relation(0));
        return visit(a, {});
      }
      case Strategy::single_order:
      case Strategy::per_object_order: return run_order(visit);
      case Strategy::seeded: return run_seeded(visit);
      case Strategy::quiescent: return run_quiescent(visit);
      case Strategy::fork:
        completeness = Completeness::restricted;
        return run_fork(visit);
      case Strategy::full:
        if (h_.size() > 4) completeness = Completeness::restricted;
        return run_full(visit);
    }
    return false;
  }

  /// A cycle in the mandatory constraints, if there is one.
  std::vector<std::size_t> mandatory_cycle() const {
    auto cyc = find_cycle(c_.mandatory_ar);
    if (!cyc.empty()) return cyc;
    return find_cycle(c_.mandatory_vis);
  }

 private:
  bool emit(const Relation& vis, std::vector<std::size_t> seq,
            const std::vector<std::size_t>& h_prime, const ExtensionVisitor& visit) {
    ++stats_.candidates;
    if (!is_acyclic(vis)) return false;
    AbstractExecution a = AbstractExecution::from_sequence(hp_, vis, std::move(seq));
    return visit(a, h_prime);
  }

  // -- single order / per-object order ------------------------------------

  bool run_order(const ExtensionVisitor& visit) {
    const bool per_object = c_.strategy == Strategy::per_object_order;
    const bool seq_only = !m_.def.has(PredicateId::RVal) && m_.def.has(PredicateId::SeqRVal);
    ReadValueTracker tracker(h_, m_, seq_only);
    Relation prec = transitive_closure(c_.mandatory_ar);
    ExtensionWalker walker(h_, prec, stats_, opt_.budget);
    const auto& pend = c_.h_prime_eligible;
    if (pend.size() > 20) throw std::runtime_error("too many pending operations to enumerate H′");

    auto leaf = [&](const std::vector<std::size_t>& seq) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pend.size()); ++mask) {
        if (++stats_.nodes > opt_.budget) throw BudgetExceeded{};
        std::vector<bool> in(h_.size(), false);
        std::vector<std::size_t> hp;
        for (std::size_t k = 0; k < pend.size(); ++k)
          if (mask >> k & 1U) {
            in[pend[k]] = true;
            hp.push_back(pend[k]);
          }
        Relation vis = order_vis(h_, seq, in, per_object);
        if (per_object) {
          vis |= c_.mandatory_vis - h_.ob();
          vis = close_vis(m_, std::move(vis), so_hb_, so_rr_);
        }
        if (emit(vis, seq, hp, visit)) return true;
      }
      return false;
    };
    if (prune_)
      return walker.run([&](std::size_t i) { return tracker.admits(i); },
                        [&](std::size_t i) { tracker.push(i); }, [&] { tracker.pop(); }, leaf);
    return walker.run(nullptr, nullptr, nullptr, leaf);
  }

  // -- seeded ---------------------------------------------------------------

  struct ReadSeed {
    std::size_t read;
    std::vector<std::vector<std::size_t>> options;  // each option: writes made visible
  };

  std::vector<ReadSeed> seed_options() const {
    std::vector<ReadSeed> out;
    const bool rval = m_.def.has(PredicateId::RVal);
    const bool seq_rval = m_.def.has(PredicateId::SeqRVal);
    if (!rval && !seq_rval) return out;
    for (std::size_t r = 0; r < h_.size(); ++r) {
      const auto& op = h_.op(r);
      if (op.pending() || !m_.rdt.checked(op)) continue;
      if (!rval && !concur_writes(h_, r).empty()) continue;
      ReadSeed s{r, {}};
      const auto& out_val = *op.oval;
      std::vector<std::size_t> pool;
      for (std::size_t w = 0; w < h_.size(); ++w)
        if (w != r && h_.is_write(w) && !h_.pending(w) && h_.obj_index(w) == h_.obj_index(r))
          pool.push_back(w);
      if (m_.rdt.kind == RdtKind::counter) {
        std::vector<std::size_t> incs;
        for (auto w : pool)
          if (h_.op(w).type == "inc") incs.push_back(w);
        if (out_val.is_int() && out_val.as_int() >= 0 &&
            static_cast<std::size_t>(out_val.as_int()) <= incs.size()) {
          auto k = static_cast<std::size_t>(out_val.as_int());
          std::vector<bool> pick(incs.size(), false);
          std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
          do {
            std::vector<std::size_t> opt;
            for (std::size_t i = 0; i < incs.size(); ++i)
              if (pick[i]) opt.push_back(incs[i]);
            s.options.push_back(std::move(opt));
          } while (std::prev_permutation(pick.begin(), pick.end()));
        }
      } else if (out_val.is_bottom()) {
        s.options.push_back({});
      } else {
        for (auto w : pool)
          if (h_.op(w).ival == out_val) s.options.push_back({w});
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  struct SeedState {
    Relation vis;
    std::vector<std::optional<std::size_t>> source;  // per read position, register only
    std::vector<bool> seeded;
  };

  /// Precedence every ar must respect given the current vis, or nullopt when
  /// the vis already contradicts a downward-closed predicate.
  std::optional<Relation> seeded_precedence(const SeedState& s) {
    const auto n = h_.size();
    if (!is_acyclic(s.vis)) return std::nullopt;
    Relation hb;
    const bool need_hb = m_.def.has(PredicateId::NoCircularCausality) ||
                         m_.def.has(PredicateId::CausalArbitration);
    if (need_hb) {
      hb = transitive_closure(so_hb_ | s.vis);
      for (std::size_t i = 0; i < n; ++i)
        if (hb.contains(i, i)) return std::nullopt;
    }
    Relation prec = c_.mandatory_ar;
    if (m_.def.has(PredicateId::CausalArbitration)) prec |= hb;
    if (m_.def.has(PredicateId::WritesFollowReads)) prec |= compose(s.vis, so_rw_);
    for (const auto& rs : seeds_) {
      auto r = rs.read;
      const auto obj = h_.obj_index(r);
      const auto& out = *h_.op(r).oval;
      std::int64_t visible_incs = 0;
      for (auto w : s.vis.predecessors(r)) {
        if (!h_.is_write(w) || h_.pending(w) || h_.obj_index(w) != obj) continue;
        if (m_.rdt.kind == RdtKind::counter) {
          if (h_.op(w).type == "inc") ++visible_incs;
          continue;
        }
        if (out.is_bottom()) return std::nullopt;
        if (s.seeded[r] && w != *s.source[r]) prec.insert(w, *s.source[r]);
      }
      if (m_.rdt.kind == RdtKind::counter && out.is_int() && visible_incs > out.as_int())
        return std::nullopt;
    }
    if (!is_acyclic(prec)) return std::nullopt;
    return prec;
  }

  bool run_seeded(const ExtensionVisitor& visit) {
    seeds_ = seed_options();
    SeedState s;
    s.vis = detail::close_vis(m_, c_.mandatory_vis, so_hb_, so_rr_);
    s.source.assign(h_.size(), std::nullopt);
    s.seeded.assign(h_.size(), false);
    for (const auto& rs : seeds_)
      if (rs.options.empty()) return false;
    visited_.clear();
    return seed_step(0, s, visit);
  }

  bool seed_step(std::size_t idx, SeedState& s, const ExtensionVisitor& visit) {
    if (++stats_.nodes > opt_.budget) throw BudgetExceeded{};
    if (prune_ && !seeded_precedence(s)) {
      ++stats_.prunes;
      return false;
    }
    if (idx == seeds_.size()) return seeded_leaf(s, visit);
    const auto& rs = seeds_[idx];
    for (const auto& opt : rs.options) {
      SeedState t = s;
      for (auto w : opt) t.vis.insert(w, rs.read);
      t.vis = close_vis(m_, std::move(t.vis), so_hb_, so_rr_);
      if (m_.rdt.kind != RdtKind::counter && !opt.empty()) t.source[rs.read] = opt.front();
      t.seeded[rs.read] = true;
      if (seed_step(idx + 1, t, visit)) return true;
    }
    return false;
  }

  bool seeded_leaf(SeedState& s, const ExtensionVisitor& visit) {
    if (++stats_.nodes > opt_.budget) throw BudgetExceeded{};
    if (!visited_.emplace(s.vis.pairs(), s.source).second) return false;
    auto prec = seeded_precedence(s);
    if (!prec) return false;

    if (m_.def.has(PredicateId::EventualVisibility) && m_.ev_slack > 0) {
      auto ev = eventual_visibility_gap(s.vis);
      if (ev) {
        for (auto b : ev->second) {
          SeedState t = s;
          t.vis.insert(ev->first, b);
          t.vis = close_vis(m_, std::move(t.vis), so_hb_, so_rr_);
          if (seeded_leaf(t, visit)) return true;
        }
        return false;
      }
    }

    const bool conditional = m_.def.has(PredicateId::KRealTimeReads);
    if (!conditional) return emit(s.vis, least_extension(h_, *prec), {}, visit);
    Relation closed = transitive_closure(*prec);
    ExtensionWalker walker(h_, closed, stats_, opt_.budget);
    return walker.run(nullptr, nullptr, nullptr, [&](const std::vector<std::size_t>& seq) {
      return emit(s.vis, seq, {}, visit);
    });
  }

  /// First (a, session) group holding more than ev_slack missing rb edges,
  /// with the operations whose edge from a is missing.
  std::optional<std::pair<std::size_t, std::vector<std::size_t>>> eventual_visibility_gap(
      const Relation& vis) const {
    const auto n = h_.size();
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<std::vector<std::size_t>> missing(h_.proc_count());
      for (std::size_t b = 0; b < n; ++b)
        if (h_.rb().contains(a, b) && !vis.contains(a, b)) missing[h_.proc_index(b)].push_back(b);
      for (auto& group : missing)
        if (group.size() > m_.ev_slack) return std::make_pair(a, std::move(group));
    }
    return std::nullopt;
  }

  // -- quiescent -------------------------------------------------------------

  bool run_quiescent(const ExtensionVisitor& visit) {
    const auto n = h_.size();
    std::vector<std::vector<std::optional<std::size_t>>> finals(h_.obj_count());
    for (std::size_t o = 0; o < h_.obj_count(); ++o) {
      for (std::size_t w = 0; w < n; ++w)
        if (h_.is_write(w) && !h_.pending(w) && h_.obj_index(w) == o) finals[o].push_back(w);
      if (finals[o].empty() || m_.rdt.kind == RdtKind::counter) finals[o] = {std::nullopt};
    }
    // The sink sees every write; the last operation in time order is as good as any.
    auto order = time_order(h_);
    const auto sink = order.back();
    Relation vis(n);
    for (std::size_t w = 0; w < n; ++w)
      if (h_.is_write(w) && w != sink) vis.insert(w, sink);

    std::vector<std::size_t> choice(h_.obj_count(), 0);
    for (;;) {
      if (++stats_.nodes > opt_.budget) throw BudgetExceeded{};
      std::vector<std::size_t> seq;
      std::vector<bool> last(n, false);
      for (std::size_t o = 0; o < h_.obj_count(); ++o)
        if (auto f = finals[o][choice[o]]) last[*f] = true;
      for (auto i : order)
        if (!last[i]) seq.push_back(i);
      for (auto i : order)
        if (last[i]) seq.push_back(i);
      if (emit(vis, seq, {}, visit)) return true;
      std::size_t o = 0;
      while (o < choice.size() && ++choice[o] == finals[o].size()) choice[o++] = 0;
      if (o == choice.size()) return false;
    }
  }

  // -- fork --------------------------------------------------------------------

  bool run_fork(const ExtensionVisitor& visit) {
    auto seeds = seed_options();
    for (const auto& rs : seeds)
      if (rs.options.empty()) return false;
    Relation prec = transitive_closure(c_.mandatory_ar);
    ExtensionWalker walker(h_, prec, stats_, opt_.budget);
    return walker.run(nullptr, nullptr, nullptr, [&](const std::vector<std::size_t>& seq) {
      std::vector<std::size_t> rank(h_.size());
      for (std::size_t i = 0; i < seq.size(); ++i) rank[seq[i]] = i;
      std::vector<std::size_t> pick(seeds.size(), 0);
      for (;;) {
        if (++stats_.nodes > opt_.budget) throw BudgetExceeded{};
        Relation base = c_.mandatory_vis;
        for (std::size_t k = 0; k < seeds.size(); ++k)
          for (auto w : seeds[k].options[pick[k]]) base.insert(w, seeds[k].read);
        std::vector<std::pair<std::size_t, std::size_t>> extra;
        for (std::size_t a = 0; a < h_.size(); ++a) {
          if (!h_.is_write(a) || h_.pending(a)) continue;
          for (std::size_t b = 0; b < h_.size(); ++b)
            if (a != b && rank[a] < rank[b] && !base.contains(a, b) &&
                h_.proc_index(a) != h_.proc_index(b) && !(prune_ && overwrites_read(base, rank, a, b)))
              extra.emplace_back(a, b);
        }
        if (fork_subsets(base, extra, seq, visit)) return true;
        std::size_t k = 0;
        while (k < pick.size() && ++pick[k] == seeds[k].options.size()) pick[k++] = 0;
        if (k == pick.size()) return false;
      }
    });
  }

  /// True when making write a visible to read b would make b's return value
  /// wrong however the remaining optional edges are chosen: a would become the
  /// latest visible write unless some later write is added too, and neither a
  /// nor any later write carries the value b returned.
  bool overwrites_read(const Relation& base, const std::vector<std::size_t>& rank, std::size_t a,
                       std::size_t b) const {
    if (m_.rdt.kind != RdtKind::register_ || !m_.def.has(PredicateId::RVal)) return false;
    if (!h_.is_read(b) || h_.pending(b) || h_.obj_index(a) != h_.obj_index(b)) return false;
    std::optional<std::size_t> best;
    for (auto w : base.predecessors(b))
      if (h_.is_write(w) && !h_.pending(w) && h_.obj_index(w) == h_.obj_index(b) &&
          (!best || rank[w] > rank[*best]))
        best = w;
    if (best && rank[*best] > rank[a]) return false;
    const auto& out = *h_.op(b).oval;
    for (std::size_t w = 0; w < h_.size(); ++w)
      if (h_.is_write(w) && !h_.pending(w) && h_.obj_index(w) == h_.obj_index(b) &&
          rank[w] >= rank[a] && rank[w] < rank[b] && h_.op(w).ival == out)
        return false;
    return true;
  }

  bool fork_subsets(const Relation& base, const std::vector<std::pair<std::size_t, std::size_t>>& extra,
                    const std::vector<std::size_t>& seq, const ExtensionVisitor& visit) {
    const auto e = extra.size();
    auto with = [&](auto&& included) {
      Relation vis = base;
      for (std::size_t i = 0; i < e; ++i)
        if (included(i)) vis.insert(extra[i].first, extra[i].second);
      return vis;
    };
    if (emit(with([](std::size_t) { return true; }), seq, {}, visit)) return true;
    if (e == 0) return false;
    if (emit(with([](std::size_t) { return false; }), seq, {}, visit)) return true;
    if (e > 16) return false;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << e); ++mask) {
      if (++stats_.nodes > opt_.budget) throw BudgetExceeded{};
      if (emit(with([&](std::size_t i) { return (mask >> i & 1U) != 0; }), seq, {}, visit))
        return true;
    }
    return false;
  }

  // -- full --------------------------------------------------------------------

  bool run_full(const ExtensionVisitor& visit) {
    const auto n = h_.size();
    std::vector<std::pair<std::size_t, std::size_t>> cand;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b || c_.mandatory_vis.contains(a, b)) continue;
        if (n > 4 && !h_.is_write(a)) continue;
        cand.push_back({a, b});
      }
    if (cand.size() > 30) throw std::runtime_error("vis candidate space too large");
    Relation prec = transitive_closure(c_.mandatory_ar);
    ExtensionWalker walker(h_, prec, stats_, opt_.budget);
    return walker.run(nullptr, nullptr, nullptr, [&](const std::vector<std::size_t>& seq) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cand.size()); ++mask) {
        if (++stats_.nodes > opt_.budget) throw BudgetExceeded{};
        Relation vis = c_.mandatory_vis;
        for (std::size_t i = 0; i < cand.size(); ++i)
          if (mask >> i & 1U) vis.insert(cand[i].first, cand[i].second);
        if (emit(vis, seq, {}, visit)) return true;
      }
      return false;
    });
  }

  const History& h_;
  std::shared_ptr<const History> hp_;
  const BoundModel& m_;
  const CheckOptions& opt_;
  bool prune_;
  SearchConstraints c_;
  SearchStats stats_;
  Relation so_hb_, so_rr_, so_rw_;
  std::vector<ReadSeed> seeds_;
  std::set<std::pair<std::vector<Relation::Pair>, std::vector<std::optional<std::size_t>>>>
      visited_;
};

}  // namespace detail

/// Enumerates the candidate executions of the model's search space without
/// return-value pruning. Throws std::runtime_error if the budget runs out.
inline SearchStats search_extensions(const History& h, const BoundModel& m,
                                     const ExtensionVisitor& visit,
                                     const CheckOptions& opt = {}) {
  detail::Engine engine(h, m, opt, false);
  if (!engine.mandatory_cycle().empty()) return engine.stats();
  Completeness c;
  try {
    engine.run(visit, c);
  } catch (const detail::BudgetExceeded&) {
    throw std::runtime_error("search budget exhausted");
  }
  return engine.stats();
}

inline bool validate_witness(const AbstractExecution& a, const BoundModel& m) {
  return evaluate_model(a, m).overall;
}

/// Decides whether some abstract execution over `h` satisfies the model.
inline CheckResult check_history(const History& h, const BoundModel& m,
                                 const CheckOptions& opt = {}) {
  if (opt.budget == 0) throw std::invalid_argument("budget must be positive");
  CheckResult res;
  detail::Engine engine(h, m, opt, true);
  res.strategy = engine.constraints().strategy;
  if (auto cyc = engine.mandatory_cycle(); !cyc.empty()) {
    res.outcome = Outcome::Violated;
    res.evidence = cyc;
    res.reason = "mandatory constraints are cyclic";
    return res;
  }
  try {
    bool found = engine.run(
        [&](const AbstractExecution& a, const std::vector<std::size_t>& hp) {
          if (!satisfies(a, m)) return false;
          res.witness = a;
          res.h_prime = hp;
          return true;
        },
        res.completeness);
    res.outcome = found ? Outcome::Satisfied : Outcome::Violated;
    if (!found) res.reason = "no abstract execution in the search space satisfies the model";
  } catch (const detail::BudgetExceeded&) {
    res.outcome = Outcome::Unknown;
    res.reason = "search budget exhausted";
  }
  res.stats = engine.stats();
  return res;
}

inline CheckResult check_history(const History& h, std::string_view model,
                                 const ModelParams& params = {}, const CheckOptions& opt = {}) {
  return check_history(h, bind(model, params), opt);
}

/// Greedy one-at-a-time removal in id order, keeping a removal whenever the
/// smaller history still satisfies `keep`. The result is subset-minimal with
/// respect to single removals.
inline History shrink_if(const History& h, const std::function<bool(const History&)>& keep) {
  History cur = h;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      std::vector<std::size_t> rest;
      for (std::size_t j = 0; j < cur.size(); ++j)
        if (j != i) rest.push_back(j);
      History cand = sub_history(cur, rest);
      if (keep(cand)) {
        cur = std::move(cand);
        changed = true;
        --i;
      }
    }
  }
  return cur;
}

inline bool exhaustively_violated(const CheckResult& r) {
  return r.outcome == Outcome::Violated && r.completeness == Completeness::exhaustive;
}

/// Smallest violating sub-history reachable by greedy removal.
inline History shrink_history(const History& h, const BoundModel& m, const CheckOptions& opt = {}) {
  if (!exhaustively_violated(check_history(h, m, opt)))
    throw std::invalid_argument("history is not violated under " + m.def.name);
  return shrink_if(h, [&](const History& c) { return exhaustively_violated(check_history(c, m, opt)); });
}

}  // namespace conscheck

#endif  // CONSCHECK_CHECKER_HPP
