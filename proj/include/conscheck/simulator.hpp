#pragma once
#ifndef CONSCHECK_SIMULATOR_HPP
#define CONSCHECK_SIMULATOR_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "generator.hpp"
#include "history.hpp"
#include "io.hpp"

namespace conscheck {

enum class StoreMode { linearizable, sequential, causal, eventual, pram };

inline const char* to_string(StoreMode m) {
  switch (m) {
    case StoreMode::linearizable: return "linearizable";
    case StoreMode::sequential: return "sequential";
    case StoreMode::causal: return "causal";
    case StoreMode::eventual: return "eventual";
    case StoreMode::pram: return "pram";
  }
  return "?";
}

inline StoreMode store_mode_by_name(const std::string& s) {
  for (auto m : {StoreMode::linearizable, StoreMode::sequential, StoreMode::causal,
                 StoreMode::eventual, StoreMode::pram})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown store mode '" + s + "'");
}

struct StoreConfig {
  StoreMode mode = StoreMode::linearizable;
  std::size_t replicas = 2;
  std::uint64_t min_delay = 1;
  std::uint64_t max_delay = 6;
  /// Largest delay on a client's link to its replica; client links are
  /// local, so their delays are drawn from 0..client_delay.
  std::uint64_t client_delay = 1;
  /// Ticks between anti-entropy rounds in eventual mode; 0 disables them.
  std::uint64_t anti_entropy = 0;
  /// Clients always talk to the same replica. Turning this off in pram mode
  /// routes every request to a random replica.
  bool sticky = true;
  /// Operations still running at this tick are recorded as pending and later
  /// ones are dropped.
  std::optional<std::uint64_t> cutoff;
};

struct PlannedOp {
  bool read = true;
  std::string obj;
  std::int64_t value = 0;
  std::uint64_t think = 0;
  friend bool operator==(const PlannedOp&, const PlannedOp&) = default;
};

struct Workload {
  std::vector<std::vector<PlannedOp>> sessions;
  friend bool operator==(const Workload&, const Workload&) = default;
};

/// A reproducible workload. Write values count up per object, so every
/// write on an object carries a distinct value.
inline Workload generate_workload(const GeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.procs < 1 || cfg.objects < 1) throw std::invalid_argument("procs and objects must be at least 1");
  if (cfg.read_ratio < 0 || cfg.read_ratio > 1) throw std::invalid_argument("read ratio must lie in [0, 1]");
  Rng rng(seed);
  Workload w;
  w.sessions.resize(cfg.procs);
  std::vector<std::int64_t> next_value(cfg.objects, 1);
  for (std::size_t i = 0; i < cfg.ops; ++i) {
    auto p = detail::draw(rng, cfg.procs);
    auto o = detail::draw(rng, cfg.objects);
    PlannedOp op;
    op.obj = detail::obj_name(o);
    op.read = detail::chance(rng, cfg.read_ratio);
    if (!op.read) op.value = next_value[o]++;
    op.think = detail::draw(rng, 4);
    w.sessions[p].push_back(std::move(op));
  }
  return w;
}

struct SimulationResult {
  History history;
  std::vector<std::string> header;
  /// Largest number of operations in one session that started after a write
  /// returned yet were served by a replica that had not applied it.
  std::uint64_t visibility_lag = 0;
};

namespace detail {

struct Stamp {
  std::uint64_t clock = 0;
  std::size_t replica = 0;
  std::uint64_t local = 0;  // orders writes a replica accepts within one tick
  auto operator<=>(const Stamp&) const = default;
};

struct Cell {
  Value value = Value::bottom();
  Stamp stamp{};
  bool written = false;
};

struct WriteMsg {
  std::size_t op = 0;  // index into the run's operation table
  std::string obj;
  std::int64_t value = 0;
  Stamp stamp;
  std::size_t origin = 0;
  std::vector<std::uint64_t> deps;  // causal mode
  std::uint64_t log_index = 0;      // sequential mode
};

class StoreSim {
 public:
  StoreSim(const StoreConfig& cfg, const Workload& w, std::uint64_t seed)
      : cfg_(cfg), w_(w), rng_(seed) {
    if (cfg.replicas < 1) throw std::invalid_argument("replica count must be at least 1");
    if (cfg.min_delay > cfg.max_delay) throw std::invalid_argument("min delay exceeds max delay");
    const auto r = cfg.replicas;
    state_.resize(r);
    applied_count_.assign(r, std::vector<std::uint64_t>(r, 0));
    clock_.assign(r, 0);
    accepted_.assign(r, 0);
    buffer_.resize(r);
    next_log_.assign(r, 0);
    channel_free_.assign(r + w.sessions.size(), std::vector<std::uint64_t>(r + w.sessions.size(), 0));
    applied_.resize(r);
    cursor_.assign(w.sessions.size(), 0);
  }

  SimulationResult run() {
    for (std::size_t p = 0; p < w_.sessions.size(); ++p) issue_next(p, 0);
    if (cfg_.mode == StoreMode::eventual && cfg_.anti_entropy > 0 && cfg_.replicas > 1)
      schedule(cfg_.anti_entropy, [this] { anti_entropy_round(); });
    while (!queue_.empty()) {
      auto ev = queue_.top();
      queue_.pop();
      if (cfg_.cutoff && ev.tick > *cfg_.cutoff) break;
      now_ = ev.tick;
      actions_[ev.action]();
      actions_[ev.action] = nullptr;
    }
    return finish();
  }

 private:
  struct Event {
    std::uint64_t tick;
    std::uint64_t seq;
    std::size_t action;
    bool operator>(const Event& o) const { return std::tie(tick, seq) > std::tie(o.tick, o.seq); }
  };

  struct Record {
    std::size_t proc = 0;
    PlannedOp plan;
    std::uint64_t stime = 0;
    std::optional<std::uint64_t> rtime;
    std::optional<Value> out;
    std::size_t replica = 0;
    std::uint64_t served_at = 0;
    // writes: tick at which each replica applied it
    std::vector<std::optional<std::uint64_t>> applied_at;
    // reads: writes applied at the serving replica when served
    std::vector<std::size_t> saw;
  };

  void schedule(std::uint64_t delay, std::function<void()> f) {
    actions_.push_back(std::move(f));
    queue_.push(Event{now_ + delay, seq_++, actions_.size() - 1});
  }

  std::uint64_t delay() { return cfg_.min_delay + draw(rng_, cfg_.max_delay - cfg_.min_delay + 1); }

  /// FIFO delivery between two endpoints.
  std::uint64_t fifo_delay(std::size_t from, std::size_t to) {
    bool client_link = from >= cfg_.replicas || to >= cfg_.replicas;
    auto d = client_link ? draw(rng_, cfg_.client_delay + 1) : delay();
    auto at = std::max(now_ + d, channel_free_[from][to]);
    channel_free_[from][to] = at;
    return at - now_;
  }

  std::size_t client_node(std::size_t p) const { return cfg_.replicas + p; }

  std::size_t home(std::size_t p) {
    if (cfg_.mode == StoreMode::linearizable) return 0;
    if (!cfg_.sticky) return draw(rng_, cfg_.replicas);
    return p % cfg_.replicas;
  }

  void issue_next(std::size_t p, std::uint64_t after) {
    if (cursor_[p] >= w_.sessions[p].size()) return;
    const auto& plan = w_.sessions[p][cursor_[p]++];
    schedule(after + plan.think, [this, p, plan] {
      Record rec;
      rec.proc = p;
      rec.plan = plan;
      rec.stime = now_;
      rec.replica = home(p);
      rec.applied_at.assign(cfg_.replicas, std::nullopt);
      ops_.push_back(std::move(rec));
      auto i = ops_.size() - 1;
      auto r = ops_[i].replica;
      schedule(fifo_delay(client_node(p), r), [this, i, r] { serve(i, r); });
    });
  }

  void reply(std::size_t i, Value out) {
    auto p = ops_[i].proc;
    auto r = ops_[i].replica;
    schedule(fifo_delay(r, client_node(p)), [this, i, p, out] {
      ops_[i].rtime = now_;
      ops_[i].out = out;
      issue_next(p, 0);
    });
  }

  void serve(std::size_t i, std::size_t r) {
    auto& rec = ops_[i];
    rec.served_at = now_;
    if (rec.plan.read) {
      rec.saw = applied_[r];
      reply(i, state_[r][rec.plan.obj].value);
      return;
    }
    WriteMsg m;
    m.op = i;
    m.obj = rec.plan.obj;
    m.value = rec.plan.value;
    m.origin = r;
    switch (cfg_.mode) {
      case StoreMode::linearizable:
        apply(r, m);
        reply(i, Value("ok"));
        return;
      case StoreMode::sequential:
        // forward to the sequencer, which is replica 0
        schedule(r == 0 ? 0 : fifo_delay(r, 0), [this, m] { sequence(m); });
        return;
      case StoreMode::causal:
        m.stamp = Stamp{++clock_[r], r, 0};
        m.deps = applied_count_[r];
        m.deps[r] += 1;
        break;
      case StoreMode::pram:
        m.stamp = Stamp{++clock_[r], r, 0};
        break;
      case StoreMode::eventual:
        m.stamp = Stamp{now_, r, ++accepted_[r]};
        break;
    }
    apply(r, m);
    reply(i, Value("ok"));
    for (std::size_t d = 0; d < cfg_.replicas; ++d) {
      if (d == r) continue;
      auto wait = cfg_.mode == StoreMode::eventual ? delay() : fifo_delay(r, d);
      schedule(wait, [this, d, m] { receive(d, m); });
    }
  }

  void sequence(WriteMsg m) {
    m.log_index = log_size_++;
    m.stamp = Stamp{m.log_index + 1, 0, 0};
    for (std::size_t d = 0; d < cfg_.replicas; ++d) {
      auto wait = d == 0 ? 0 : fifo_delay(0, d);
      schedule(wait, [this, d, m] { receive(d, m); });
    }
  }

  void receive(std::size_t r, const WriteMsg& m) {
    switch (cfg_.mode) {
      case StoreMode::sequential:
      case StoreMode::causal:
        buffer_[r].push_back(m);
        drain(r);
        return;
      default:
        apply(r, m);
    }
  }

  bool deliverable(std::size_t r, const WriteMsg& m) const {
    if (cfg_.mode == StoreMode::sequential) return m.log_index == next_log_[r];
    for (std::size_t k = 0; k < cfg_.replicas; ++k) {
      if (k == m.origin) {
        if (applied_count_[r][k] + 1 != m.deps[k]) return false;
      } else if (applied_count_[r][k] < m.deps[k]) {
        return false;
      }
    }
    return true;
  }

  void drain(std::size_t r) {
    for (bool progress = true; progress;) {
      progress = false;
      auto& buf = buffer_[r];
      for (auto it = buf.begin(); it != buf.end(); ++it) {
        if (!deliverable(r, *it)) continue;
        WriteMsg m = *it;
        buf.erase(it);
        apply(r, m);
        if (cfg_.mode == StoreMode::sequential) {
          ++next_log_[r];
          if (ops_[m.op].replica == r) reply(m.op, Value("ok"));
        }
        progress = true;
        break;
      }
    }
  }

  void apply(std::size_t r, const WriteMsg& m) {
    if (ops_[m.op].applied_at[r]) return;  // already merged by anti-entropy
    auto& cell = state_[r][m.obj];
    bool wins = cfg_.mode == StoreMode::linearizable || cfg_.mode == StoreMode::sequential ||
                !cell.written || cell.stamp < m.stamp;
    if (wins) cell = Cell{Value(m.value), m.stamp, true};
    if (cfg_.mode == StoreMode::causal || cfg_.mode == StoreMode::pram)
      clock_[r] = std::max(clock_[r], m.stamp.clock);
    applied_count_[r][m.origin] += 1;
    applied_[r].push_back(m.op);
    ops_[m.op].applied_at[r] = now_;
  }

  void anti_entropy_round() {
    auto from = draw(rng_, cfg_.replicas);
    auto to = (from + 1 + draw(rng_, cfg_.replicas - 1)) % cfg_.replicas;
    auto snapshot = state_[from];
    auto writes = applied_[from];
    schedule(delay(), [this, to, snapshot, writes] {
      for (const auto& [obj, cell] : snapshot) {
        auto& mine = state_[to][obj];
        if (cell.written && (!mine.written || mine.stamp < cell.stamp)) mine = cell;
      }
      for (auto w : writes) {
        if (ops_[w].applied_at[to]) continue;
        ops_[w].applied_at[to] = now_;
        applied_[to].push_back(w);
      }
    });
    if (!all_done()) schedule(cfg_.anti_entropy, [this] { anti_entropy_round(); });
  }

  bool all_done() const {
    for (std::size_t p = 0; p < w_.sessions.size(); ++p)
      if (cursor_[p] < w_.sessions[p].size()) return false;
    for (const auto& rec : ops_)
      if (!rec.rtime) return false;
    return true;
  }

  SimulationResult finish() {
    SimulationResult res;
    std::vector<Operation> ops;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const auto& rec = ops_[i];
      Operation op;
      op.id = OpId{i};
      op.proc = proc_name(rec.proc);
      op.obj = rec.plan.obj;
      op.stime = rec.stime;
      op.rtime = rec.rtime;
      if (rec.plan.read) {
        op.type = "rd";
        if (rec.rtime) op.oval = rec.out;
      } else {
        op.type = "wr";
        op.ival = Value(rec.plan.value);
        if (rec.rtime) op.oval = Value("ok");
      }
      ops.push_back(std::move(op));
    }
    res.history = build_history(std::move(ops));
    for (std::size_t w = 0; w < ops_.size(); ++w) {
      if (ops_[w].plan.read || !ops_[w].rtime) continue;
      std::vector<std::uint64_t> per_session(w_.sessions.size(), 0);
      for (std::size_t b = 0; b < ops_.size(); ++b) {
        const auto& rb = ops_[b];
        if (!rb.plan.read || !rb.rtime || rb.stime <= *ops_[w].rtime) continue;
        if (std::find(rb.saw.begin(), rb.saw.end(), w) != rb.saw.end()) continue;
        res.visibility_lag = std::max(res.visibility_lag, ++per_session[rb.proc]);
      }
    }
    return res;
  }

  const StoreConfig& cfg_;
  const Workload& w_;
  Rng rng_;
  std::uint64_t now_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
  std::vector<std::function<void()>> actions_;
  std::vector<Record> ops_;
  std::vector<std::map<std::string, Cell>> state_;
  std::vector<std::vector<std::uint64_t>> applied_count_;
  std::vector<std::uint64_t> clock_;
  std::vector<std::uint64_t> accepted_;
  std::vector<std::vector<WriteMsg>> buffer_;
  std::vector<std::uint64_t> next_log_;
  std::uint64_t log_size_ = 0;
  std::vector<std::vector<std::uint64_t>> channel_free_;
  std::vector<std::vector<std::size_t>> applied_;
  std::vector<std::size_t> cursor_;
};

}  // namespace detail

/// Runs the workload against a simulated store. The same configuration,
/// workload and seed always produce the same history.
inline SimulationResult simulate_store(const StoreConfig& store, const Workload& w, std::uint64_t seed) {
  detail::StoreSim sim(store, w, seed);
  auto res = sim.run();
  std::string line = std::string("simulate mode=") + to_string(store.mode) +
                     " replicas=" + std::to_string(store.replicas) +
                     " min_delay=" + std::to_string(store.min_delay) +
                     " max_delay=" + std::to_string(store.max_delay) +
                     " client_delay=" + std::to_string(store.client_delay) +
                     " anti_entropy=" + std::to_string(store.anti_entropy) +
                     " sticky=" + (store.sticky ? "1" : "0") + " seed=" + std::to_string(seed);
  if (store.cutoff) line += " cutoff=" + std::to_string(*store.cutoff);
  res.header.push_back(line);
  return res;
}

/// Generates a workload and simulates it, recording the generator settings
/// in the header so the run can be replayed.
inline SimulationResult simulate(const StoreConfig& store, const GeneratorConfig& cfg, std::uint64_t seed) {
  auto res = simulate_store(store, generate_workload(cfg, seed), seed);
  res.header.push_back("workload procs=" + std::to_string(cfg.procs) +
                       " objects=" + std::to_string(cfg.objects) + " ops=" + std::to_string(cfg.ops) +
                       " read_ratio=" + std::to_string(cfg.read_ratio));
  return res;
}

inline std::string simulation_text(const SimulationResult& r) { return write_history(r.history, r.header); }

}  // namespace conscheck

#endif  // CONSCHECK_SIMULATOR_HPP
