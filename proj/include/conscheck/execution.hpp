#pragma once
#ifndef CONSCHECK_EXECUTION_HPP
#define CONSCHECK_EXECUTION_HPP

#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "history.hpp"
#include "relation.hpp"

namespace conscheck {

/// A history together with a visibility relation and an arbitration order.
///
/// Construction validates the invariants: vis is acyclic and ar is a strict
/// total order over the whole history. The arbitration sequence and rank of
/// every operation are cached because most predicates only ask "is a before b
/// in ar".
class AbstractExecution {
 public:
  AbstractExecution(std::shared_ptr<const History> h, Relation vis, Relation ar)
      : h_(std::move(h)), vis_(std::move(vis)), ar_(std::move(ar)) {
    check_carrier();
    if (!is_total_order(ar_)) throw std::invalid_argument("ar is not a total order");
    seq_ = sequence_from_order(ar_);
    fill_rank();
    if (!is_acyclic(vis_)) throw std::invalid_argument("vis is cyclic");
  }

  /// Builds ar from a permutation of positions, first element least.
  static AbstractExecution from_sequence(std::shared_ptr<const History> h, Relation vis,
                                         std::vector<std::size_t> seq) {
    const auto n = h ? h->size() : 0;
    Relation ar = order_from_sequence(n, seq);
    return AbstractExecution(std::move(h), std::move(vis), std::move(ar), std::move(seq));
  }

  const History& history() const { return *h_; }
  const std::shared_ptr<const History>& history_ptr() const { return h_; }
  std::size_t size() const { return h_->size(); }
  const Relation& vis() const { return vis_; }
  const Relation& ar() const { return ar_; }
  const std::vector<std::size_t>& ar_sequence() const { return seq_; }
  std::size_t rank(std::size_t i) const { return rank_.at(i); }
  bool ar_before(std::size_t a, std::size_t b) const { return rank_.at(a) < rank_.at(b); }

 private:
  AbstractExecution(std::shared_ptr<const History> h, Relation vis, Relation ar,
                    std::vector<std::size_t> seq)
      : h_(std::move(h)), vis_(std::move(vis)), ar_(std::move(ar)), seq_(std::move(seq)) {
    check_carrier();
    fill_rank();
    if (!is_acyclic(vis_)) throw std::invalid_argument("vis is cyclic");
  }

  void check_carrier() const {
    if (!h_) throw std::invalid_argument("abstract execution without a history");
    if (vis_.size() != h_->size() || ar_.size() != h_->size())
      throw std::invalid_argument("vis/ar carrier does not match the history");
  }
  void fill_rank() {
    rank_.assign(seq_.size(), 0);
    for (std::size_t i = 0; i < seq_.size(); ++i) rank_[seq_[i]] = i;
  }

  std::shared_ptr<const History> h_;
  Relation vis_, ar_;
  std::vector<std::size_t> seq_, rank_;
};

/// hb = (so ∪ vis)⁺
inline Relation happens_before(const AbstractExecution& a) {
  return transitive_closure(a.history().so() | a.vis());
}

/// hbo = ((so ∩ ob) ∪ vis)⁺
inline Relation per_object_happens_before(const AbstractExecution& a) {
  const auto& h = a.history();
  return transitive_closure((h.so() & h.ob()) | a.vis());
}

inline std::shared_ptr<const History> share(History h) {
  return std::make_shared<const History>(std::move(h));
}

}  // namespace conscheck

#endif  // CONSCHECK_EXECUTION_HPP
