#pragma once
#ifndef CONSCHECK_RELATION_HPP
#define CONSCHECK_RELATION_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conscheck {

/// Binary relation over the dense index set {0, ..., n-1}.
///
/// Stored as an n x n bit matrix, one row of 64-bit words per element. The
/// carrier size is part of the value: combining relations over different
/// carriers throws std::invalid_argument.
class Relation {
 public:
  using Pair = std::pair<std::size_t, std::size_t>;

  Relation() = default;
  explicit Relation(std::size_t n)
      : n_(n), words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

  Relation(std::size_t n, std::span<const Pair> pairs) : Relation(n) {
    for (const auto& [a, b] : pairs) insert(a, b);
  }
  Relation(std::size_t n, std::initializer_list<Pair> pairs)
      : Relation(n, std::span<const Pair>(pairs.begin(), pairs.size())) {}

  static Relation identity(std::size_t n) {
    Relation r(n);
    for (std::size_t i = 0; i < n; ++i) r.insert(i, i);
    return r;
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t words() const noexcept { return words_; }

  bool contains(std::size_t a, std::size_t b) const {
    check_index(a);
    check_index(b);
    return (bits_[a * words_ + b / 64] >> (b % 64)) & 1U;
  }
  void insert(std::size_t a, std::size_t b) {
    check_index(a);
    check_index(b);
    bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
  }
  void erase(std::size_t a, std::size_t b) {
    check_index(a);
    check_index(b);
    bits_[a * words_ + b / 64] &= ~(std::uint64_t{1} << (b % 64));
  }

  std::span<const std::uint64_t> row(std::size_t a) const {
    check_index(a);
    return {bits_.data() + a * words_, words_};
  }
  std::span<std::uint64_t> row(std::size_t a) {
    check_index(a);
    return {bits_.data() + a * words_, words_};
  }

  bool row_empty(std::size_t a) const {
    for (auto w : row(a))
      if (w != 0) return false;
    return true;
  }
  std::size_t row_count(std::size_t a) const {
    std::size_t c = 0;
    for (auto w : row(a)) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// Successors of `a` in increasing index order.
  std::vector<std::size_t> successors(std::size_t a) const {
    std::vector<std::size_t> out;
    auto r = row(a);
    for (std::size_t w = 0; w < r.size(); ++w) {
      auto bits = r[w];
      while (bits != 0) {
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }
  std::vector<std::size_t> predecessors(std::size_t b) const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < n_; ++a)
      if (contains(a, b)) out.push_back(a);
    return out;
  }

  bool empty() const noexcept {
    for (auto w : bits_)
      if (w != 0) return false;
    return true;
  }
  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// All pairs, ordered lexicographically.
  std::vector<Pair> pairs() const {
    std::vector<Pair> out;
    for (std::size_t a = 0; a < n_; ++a)
      for (auto b : successors(a)) out.emplace_back(a, b);
    return out;
  }

  Relation& operator|=(const Relation& o) {
    require_same_carrier(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }
  Relation& operator&=(const Relation& o) {
    require_same_carrier(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
    return *this;
  }
  Relation& operator-=(const Relation& o) {
    require_same_carrier(o);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~o.bits_[i];
    return *this;
  }
  friend Relation operator|(Relation a, const Relation& b) { return a |= b; }
  friend Relation operator&(Relation a, const Relation& b) { return a &= b; }
  friend Relation operator-(Relation a, const Relation& b) { return a -= b; }
  friend bool operator==(const Relation&, const Relation&) = default;

  void require_same_carrier(const Relation& o) const {
    if (o.n_ != n_)
      throw std::invalid_argument("relations over different carriers (" +
                                  std::to_string(n_) + " vs " +
                                  std::to_string(o.n_) + " elements)");
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= n_)
      throw std::out_of_range("relation index " + std::to_string(i) +
                              " outside carrier of size " + std::to_string(n_));
  }

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Relational composition r1;r2 = {(a,c) : ∃b. (a,b) ∈ r1 ∧ (b,c) ∈ r2}.
inline Relation compose(const Relation& r1, const Relation& r2) {
  r1.require_same_carrier(r2);
  Relation out(r1.size());
  for (std::size_t a = 0; a < r1.size(); ++a) {
    auto dst = out.row(a);
    for (auto b : r1.successors(a)) {
      auto src = r2.row(b);
      for (std::size_t w = 0; w < dst.size(); ++w) dst[w] |= src[w];
    }
  }
  return out;
}

/// Smallest transitive relation containing r (Warshall over bit rows).
inline Relation transitive_closure(Relation r) {
  const auto n = r.size();
  for (std::size_t k = 0; k < n; ++k) {
    auto krow = r.row(k);
    std::vector<std::uint64_t> kbits(krow.begin(), krow.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.contains(i, k)) continue;
      auto irow = r.row(i);
      for (std::size_t w = 0; w < irow.size(); ++w) irow[w] |= kbits[w];
    }
  }
  return r;
}

inline Relation inverse(const Relation& r) {
  Relation out(r.size());
  for (const auto& [a, b] : r.pairs()) out.insert(b, a);
  return out;
}

inline bool is_subset(const Relation& r1, const Relation& r2) {
  r1.require_same_carrier(r2);
  for (std::size_t a = 0; a < r1.size(); ++a) {
    auto x = r1.row(a);
    auto y = r2.row(a);
    for (std::size_t w = 0; w < x.size(); ++w)
      if ((x[w] & ~y[w]) != 0) return false;
  }
  return true;
}

/// Lexicographically smallest pair of r1 \ r2, if any.
inline std::optional<Relation::Pair> first_missing(const Relation& r1,
                                                   const Relation& r2) {
  r1.require_same_carrier(r2);
  for (std::size_t a = 0; a < r1.size(); ++a) {
    auto x = r1.row(a);
    auto y = r2.row(a);
    for (std::size_t w = 0; w < x.size(); ++w) {
      auto d = x[w] & ~y[w];
      if (d != 0)
        return Relation::Pair{a, w * 64 + static_cast<std::size_t>(std::countr_zero(d))};
    }
  }
  return std::nullopt;
}

/// Acyclicity by repeated removal of sources (Kahn).
inline bool is_acyclic(const Relation& r) {
  const auto n = r.size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (auto b : r.successors(a)) ++indegree[b];
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t removed = 0;
  while (!ready.empty()) {
    auto a = ready.back();
    ready.pop_back();
    ++removed;
    for (auto b : r.successors(a))
      if (--indegree[b] == 0) ready.push_back(b);
  }
  return removed == n;
}

/// One cycle of r as a vertex sequence (first vertex not repeated), or empty
/// when r is acyclic.
inline std::vector<std::size_t> find_cycle(const Relation& r) {
  const auto n = r.size();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;
  auto dfs = [&](auto&& self, std::size_t a) -> bool {
    state[a] = 1;
    stack.push_back(a);
    for (auto b : r.successors(a)) {
      if (state[b] == 1) {
        auto it = std::find(stack.begin(), stack.end(), b);
        cycle.assign(it, stack.end());
        return true;
      }
      if (state[b] == 0 && self(self, b)) return true;
    }
    stack.pop_back();
    state[a] = 2;
    return false;
  };
  for (std::size_t i = 0; i < n; ++i)
    if (state[i] == 0 && dfs(dfs, i)) return cycle;
  return {};
}

/// Strict total order over the elements flagged in `carrier`: irreflexive,
/// transitive, and every two distinct carrier elements are comparable. Pairs
/// leaving the carrier are ignored.
inline bool is_total_order(const Relation& r, const std::vector<bool>& carrier) {
  const auto n = r.size();
  if (carrier.size() != n)
    throw std::invalid_argument("carrier mask does not match relation size");
  for (std::size_t a = 0; a < n; ++a) {
    if (!carrier[a]) continue;
    if (r.contains(a, a)) return false;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!carrier[b]) continue;
      if (r.contains(a, b) == r.contains(b, a)) return false;
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!carrier[a]) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (!carrier[b] || !r.contains(a, b)) continue;
      for (std::size_t c = 0; c < n; ++c)
        if (carrier[c] && r.contains(b, c) && !r.contains(a, c)) return false;
    }
  }
  return true;
}

inline bool is_total_order(const Relation& r) {
  return is_total_order(r, std::vector<bool>(r.size(), true));
}

/// Strict total order whose sequence is `order` (first element is least).
inline Relation order_from_sequence(std::size_t n, std::span<const std::size_t> order) {
  if (order.size() != n)
    throw std::invalid_argument("sequence does not cover the carrier");
  Relation r(n);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= n || seen[order[i]])
      throw std::invalid_argument("sequence is not a permutation");
    seen[order[i]] = true;
    for (std::size_t j = i + 1; j < order.size(); ++j) r.insert(order[i], order[j]);
  }
  return r;
}

/// Inverse of order_from_sequence for a strict total order.
inline std::vector<std::size_t> sequence_from_order(const Relation& r) {
  const auto n = r.size();
  std::vector<std::size_t> seq(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t preds = 0;
    for (std::size_t b = 0; b < n; ++b)
      if (r.contains(b, a)) ++preds;
    if (preds >= n) throw std::invalid_argument("relation is not a total order");
    seq[preds] = a;
  }
  return seq;
}

}  // namespace conscheck

#endif  // CONSCHECK_RELATION_HPP
