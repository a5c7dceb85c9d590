#include <gtest/gtest.h>

#include "conscheck/simulator.hpp"

using namespace conscheck;

namespace {

const char* contract(StoreMode m) {
  switch (m) {
    case StoreMode::linearizable: return "linearizability";
    case StoreMode::sequential: return "sequential";
    case StoreMode::causal: return "causality";
    case StoreMode::pram: return "pram";
    case StoreMode::eventual: return "eventual-consistency";
  }
  return "";
}

BoundModel contract_model(StoreMode m, const SimulationResult& r) {
  ModelParams p;
  if (m == StoreMode::eventual) p.ev_slack = r.visibility_lag;
  return bind(contract(m), p);
}

GeneratorConfig workload(std::size_t ops) {
  GeneratorConfig cfg;
  cfg.procs = 3;
  cfg.objects = 2;
  cfg.ops = ops;
  cfg.read_ratio = 0.5;
  return cfg;
}

}  // namespace

TEST(Simulator, SameSeedSameHistory) {
  for (auto mode : {StoreMode::linearizable, StoreMode::causal, StoreMode::eventual}) {
    StoreConfig store;
    store.mode = mode;
    for (std::uint64_t s = 0; s < 10; ++s)
      EXPECT_EQ(simulation_text(simulate(store, workload(8), s)), simulation_text(simulate(store, workload(8), s)));
  }
}

TEST(Simulator, HeaderNamesTheRun) {
  StoreConfig store;
  store.mode = StoreMode::pram;
  auto text = simulation_text(simulate(store, workload(4), 17));
  ASSERT_EQ(text.rfind("# ", 0), 0u);
  EXPECT_NE(text.find("pram"), std::string::npos);
  EXPECT_NE(text.find("17"), std::string::npos);
}

TEST(Simulator, SingleWrite) {
  GeneratorConfig cfg;
  cfg.procs = 1;
  cfg.ops = 1;
  cfg.read_ratio = 0.0;
  StoreConfig store;
  auto r = simulate(store, cfg, 3);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_TRUE(r.history.op(0).is_write());
  EXPECT_TRUE(r.history.op(0).rtime.has_value());
}

TEST(Simulator, ReadOnlyWorkloadReadsBottom) {
  auto cfg = workload(9);
  cfg.read_ratio = 1.0;
  for (auto mode : {StoreMode::linearizable, StoreMode::sequential, StoreMode::causal, StoreMode::pram,
                    StoreMode::eventual}) {
    StoreConfig store;
    store.mode = mode;
    auto r = simulate(store, cfg, 5);
    for (const auto& op : r.history.ops()) {
      ASSERT_TRUE(op.is_read());
      ASSERT_EQ(op.oval, Value::bottom());
    }
  }
}

TEST(Simulator, WriteValuesAreUniquePerObject) {
  auto cfg = workload(12);
  cfg.read_ratio = 0.3;
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto w = generate_workload(cfg, s);
    std::set<std::pair<std::string, std::int64_t>> seen;
    for (const auto& session : w.sessions)
      for (const auto& op : session)
        if (!op.read) {
          EXPECT_TRUE(seen.insert({op.obj, op.value}).second);
        }
  }
}

TEST(Simulator, EveryModeMeetsItsContract) {
  for (auto mode : {StoreMode::linearizable, StoreMode::sequential, StoreMode::causal, StoreMode::pram,
                    StoreMode::eventual}) {
    StoreConfig store;
    store.mode = mode;
    for (std::uint64_t s = 0; s < 40; ++s) {
      auto r = simulate(store, workload(4 + s % 4), s);
      auto m = contract_model(mode, r);
      auto res = check_history(r.history, m);
      ASSERT_EQ(res.outcome, Outcome::Satisfied) << to_string(mode) << " seed " << s << "\n"
                                                 << simulation_text(r);
    }
  }
}

TEST(Simulator, InstantPropagationIsLinearizable) {
  StoreConfig store;
  store.mode = StoreMode::eventual;
  store.min_delay = 0;
  store.max_delay = 0;
  store.client_delay = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto r = simulate(store, workload(6), s);
    ASSERT_EQ(check_history(r.history, "linearizability").outcome, Outcome::Satisfied) << simulation_text(r);
  }
}

TEST(Simulator, WeakModesCanBreakStrongerModels) {
  StoreConfig store;
  store.mode = StoreMode::eventual;
  store.sticky = false;
  int broken = 0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    auto r = simulate(store, workload(6), s);
    broken += check_history(r.history, "sequential").outcome == Outcome::Violated;
  }
  EXPECT_GT(broken, 0);
}

TEST(Simulator, CutoffLeavesOperationsPending) {
  StoreConfig store;
  store.cutoff = 3;
  bool pending = false;
  for (std::uint64_t s = 0; s < 20 && !pending; ++s)
    for (const auto& op : simulate(store, workload(8), s).history.ops()) pending = pending || op.pending();
  EXPECT_TRUE(pending);
}

TEST(Simulator, UnknownModeIsRejected) {
  EXPECT_THROW(store_mode_by_name("strict"), std::invalid_argument);
  EXPECT_EQ(store_mode_by_name("causal"), StoreMode::causal);
}
