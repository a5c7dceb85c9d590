// Runs a few seeded causal-store simulations and reports which of them
// are causally consistent but not sequentially consistent.
#include <iostream>

#include "conscheck/conscheck.hpp"

using namespace conscheck;

int main(int argc, char** argv) {
  std::uint64_t runs = argc > 1 ? std::stoull(argv[1]) : 200;
  GeneratorConfig cfg;
  cfg.procs = 2;
  cfg.objects = 2;
  cfg.ops = 6;
  StoreConfig store;
  store.mode = StoreMode::causal;
  store.max_delay = 10;

  std::uint64_t causal = 0, not_sequential = 0;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    auto sim = simulate(store, cfg, seed);
    if (check_history(sim.history, "causality").outcome == Outcome::Satisfied) ++causal;
    if (exhaustively_violated(check_history(sim.history, "sequential"))) {
      if (not_sequential++ == 0) std::cout << "first non-sequential run:\n" << simulation_text(sim) << "\n";
    }
  }
  std::cout << causal << "/" << runs << " runs causal, " << not_sequential << " not sequential\n";
  return causal == runs ? 0 : 1;
}
