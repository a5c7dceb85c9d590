#pragma once
#ifndef CONSCHECK_GENERATOR_HPP
#define CONSCHECK_GENERATOR_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "checker.hpp"
#include "history.hpp"
#include "rdt.hpp"

namespace conscheck {

struct GeneratorConfig {
  std::size_t procs = 2;
  std::size_t objects = 1;
  std::size_t ops = 4;
  /// Writes draw their value from 1..values.
  std::int64_t values = 3;
  double read_ratio = 0.5;
  /// Chance that a process's last operation is left pending.
  double pending_ratio = 0.0;
  bool distinct_timestamps = true;
  /// "register" or "counter"; counter histories use "inc" updates.
  std::string rdt = "register";
  /// Probability of each optional vis edge when visibility is sampled.
  double vis_density = 0.5;
  /// Chance that a read's output is drawn at random instead of computed
  /// from its context.
  double read_noise = 0.0;
};

using Rng = std::mt19937_64;

namespace detail {

inline std::size_t draw(Rng& rng, std::size_t n) { return n ? static_cast<std::size_t>(rng() % n) : 0; }

inline bool chance(Rng& rng, double p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  return static_cast<double>(rng() % 1'000'000) < p * 1'000'000.0;
}

inline std::string proc_name(std::size_t i) { return "p" + std::to_string(i + 1); }

inline std::string obj_name(std::size_t i) {
  static const char* names[] = {"x", "y", "z", "u", "v", "w"};
  return i < 6 ? names[i] : "o" + std::to_string(i);
}

/// Operations with sessions, objects, kinds, intervals and write values;
/// returning reads get ⊥ as a stand-in output.
inline std::vector<Operation> skeleton(const GeneratorConfig& cfg, Rng& rng) {
  const bool counter = cfg.rdt == "counter";
  const auto procs = std::max<std::size_t>(cfg.procs, 1);
  const auto objs = std::max<std::size_t>(cfg.objects, 1);
  std::vector<std::vector<Operation>> per_proc(procs);
  for (std::size_t i = 0; i < cfg.ops; ++i) {
    auto p = draw(rng, procs);
    Operation op;
    op.proc = proc_name(p);
    op.obj = obj_name(draw(rng, objs));
    if (chance(rng, cfg.read_ratio)) {
      op.type = "rd";
    } else if (counter) {
      op.type = "inc";
      op.ival = Value(std::int64_t{1});
    } else {
      op.type = "wr";
      op.ival = Value(1 + static_cast<std::int64_t>(draw(rng, static_cast<std::size_t>(std::max<std::int64_t>(cfg.values, 1)))));
    }
    per_proc[p].push_back(std::move(op));
  }
  std::vector<bool> last_pending(procs, false);
  for (std::size_t p = 0; p < procs; ++p) last_pending[p] = !per_proc[p].empty() && chance(rng, cfg.pending_ratio);

  // Interleave start/end events process by process.
  std::vector<std::size_t> next(procs, 0);
  std::vector<bool> open(procs, false);
  std::uint64_t t = 0;
  std::vector<Operation> out;
  std::vector<std::vector<Operation>> done(procs);
  for (auto& v : done) v.reserve(cfg.ops);
  for (;;) {
    std::vector<std::size_t> live;
    for (std::size_t p = 0; p < procs; ++p)
      if (open[p] || next[p] < per_proc[p].size()) live.push_back(p);
    if (live.empty()) break;
    auto p = live[draw(rng, live.size())];
    if (!open[p]) {
      done[p].push_back(per_proc[p][next[p]++]);
      done[p].back().stime = t;
      open[p] = true;
      bool last = next[p] == per_proc[p].size();
      if (last && last_pending[p]) open[p] = false;  // never returns
    } else {
      auto& op = done[p].back();
      op.rtime = t;
      op.oval = op.is_read() ? Value::bottom() : Value("ok");
      open[p] = false;
    }
    if (cfg.distinct_timestamps || chance(rng, 0.5)) ++t;
  }
  for (auto& v : done)
    for (auto& op : v) out.push_back(std::move(op));
  std::stable_sort(out.begin(), out.end(),
                   [](const Operation& a, const Operation& b) { return a.stime < b.stime; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = OpId{i};
  return out;
}

inline std::vector<std::size_t> random_extension(const Relation& prec, Rng& rng) {
  const auto n = prec.size();
  std::vector<std::size_t> indeg(n, 0), seq;
  for (const auto& [a, b] : prec.pairs()) ++indeg[b];
  std::vector<bool> placed(n, false);
  while (seq.size() < n) {
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
      if (!placed[i] && indeg[i] == 0) ready.push_back(i);
    if (ready.empty()) return {};
    auto x = ready[draw(rng, ready.size())];
    placed[x] = true;
    seq.push_back(x);
    for (auto y : prec.successors(x)) --indeg[y];
  }
  return seq;
}

inline Value random_output(const std::vector<Operation>& ops, const Operation& r,
                           const GeneratorConfig& cfg, Rng& rng) {
  if (cfg.rdt == "counter") {
    std::int64_t incs = 0;
    for (const auto& o : ops)
      if (o.type == "inc" && o.obj == r.obj) ++incs;
    return Value(static_cast<std::int64_t>(draw(rng, static_cast<std::size_t>(incs + 2))));
  }
  auto v = draw(rng, static_cast<std::size_t>(std::max<std::int64_t>(cfg.values, 1) + 1));
  return v == 0 ? Value::bottom() : Value(static_cast<std::int64_t>(v));
}

/// Rewrites read outputs to the values the execution's data type intends,
/// with occasional noise, and rebuilds the execution on the new history.
inline AbstractExecution settle_reads(const AbstractExecution& a, const GeneratorConfig& cfg,
                                      Rng& rng, const std::vector<bool>& free_choice) {
  auto spec = rdt_by_name(cfg.rdt);
  auto ops = a.history().ops();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!ops[i].is_read() || ops[i].pending()) continue;
    if (free_choice[i] || chance(rng, cfg.read_noise))
      ops[i].oval = random_output(ops, ops[i], cfg, rng);
    else
      ops[i].oval = rval_set(spec, a, i).front();
  }
  return AbstractExecution(share(build_history(std::move(ops))), a.vis(), a.ar());
}

}  // namespace detail

/// A random history with random read outputs.
inline History random_history(const GeneratorConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  auto ops = detail::skeleton(cfg, rng);
  for (auto& op : ops)
    if (op.is_read() && !op.pending()) op.oval = detail::random_output(ops, op, cfg, rng);
  return build_history(std::move(ops));
}

/// A random abstract execution. Without a bias model, ar is a uniform
/// permutation and vis a random acyclic relation unrelated to it. With one,
/// ar is a random linear extension of the model's mandatory order and vis is
/// shaped so that the model's structural predicates tend to hold. Read
/// outputs are then computed from each read's context.
inline AbstractExecution random_abstract_execution(const GeneratorConfig& cfg, std::uint64_t seed,
                                                   const std::optional<BoundModel>& bias = std::nullopt) {
  using P = PredicateId;
  Rng rng(seed);
  for (int attempt = 0;; ++attempt) {
    if (attempt == 1000) throw std::runtime_error("could not sample an execution for the bias model");
    auto h = share(build_history(detail::skeleton(cfg, rng)));
    const auto n = h->size();
    std::vector<bool> free_choice(n, false);
    if (!bias) {
      auto seq = detail::random_extension(Relation(n), rng);
      auto topo = detail::random_extension(Relation(n), rng);
      Relation vis(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (detail::chance(rng, cfg.vis_density)) vis.insert(topo[i], topo[j]);
      AbstractExecution a = AbstractExecution::from_sequence(h, std::move(vis), std::move(seq));
      return detail::settle_reads(a, cfg, rng, free_choice);
    }
    const auto& m = *bias;
    auto c = derive_constraints(*h, m);
    const Relation so_hb = m.def.per_object_hb ? (h->so() & h->ob()) : h->so();
    Relation prec = c.mandatory_ar | c.mandatory_vis;
    if (m.def.has(P::CausalArbitration) || m.def.has(P::CausalVisibility)) prec |= so_hb;
    if (!is_acyclic(prec)) continue;
    auto seq = detail::random_extension(transitive_closure(prec), rng);
    if (seq.size() != n) continue;
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[seq[i]] = i;

    Relation vis(n);
    const bool so_mode = m.def.has(P::SingleOrder);
    const bool poso_mode = m.def.has(P::PerObjectSingleOrder);
    if (so_mode || poso_mode) {
      std::vector<bool> hidden(n, false);
      for (auto i : c.h_prime_eligible) hidden[i] = detail::chance(rng, 0.5);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (x != y && rank[x] < rank[y] && !hidden[x] &&
              (so_mode || h->obj_index(x) == h->obj_index(y)))
            vis.insert(x, y);
      if (poso_mode) vis |= c.mandatory_vis;
    } else {
      vis = c.mandatory_vis;
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (x != y && rank[x] < rank[y] && detail::chance(rng, cfg.vis_density)) vis.insert(x, y);
      vis = detail::close_vis(m, std::move(vis), so_hb,
                              restrict(h->so(), *h, KindFilter::read, KindFilter::read));
    }
    if (!is_acyclic(vis)) continue;
    // Arbitration only has to follow vis when the model says so.
    if (!so_mode && !poso_mode && detail::chance(rng, 0.5)) {
      Relation prec2 = c.mandatory_ar;
      if (m.def.has(P::CausalArbitration)) prec2 |= vis | so_hb;
      auto seq2 = detail::random_extension(transitive_closure(prec2), rng);
      if (seq2.size() == n) seq = std::move(seq2);
    }

    if (!m.def.has(P::RVal) && m.def.has(P::SeqRVal))
      for (std::size_t i = 0; i < n; ++i)
        free_choice[i] = h->is_read(i) && !concur_writes(*h, i).empty();
    AbstractExecution a = AbstractExecution::from_sequence(h, std::move(vis), std::move(seq));
    return detail::settle_reads(a, cfg, rng, free_choice);
  }
}

}  // namespace conscheck

#endif  // CONSCHECK_GENERATOR_HPP
