// Builds the crossing-writes history in code and prints a verdict for every
// registered model.
#include <iostream>

#include "conscheck/conscheck.hpp"

using namespace conscheck;

int main() {
  auto h = build_history({
      Operation::write(1, "pa", "x", Value(std::int64_t{1}), 0, 10),
      Operation::read(2, "pa", "y", Value::bottom(), 20, 30),
      Operation::write(3, "pb", "y", Value(std::int64_t{1}), 0, 10),
      Operation::read(4, "pb", "x", Value::bottom(), 20, 30),
  });

  for (const auto& def : list_models()) {
    ModelParams p;
    if (def.needs_delta()) p.delta = 0;
    if (def.needs_k()) p.k_versions = 1;
    auto r = check_history(h, bind(def, p));
    std::cout << def.name << ": " << to_string(r.outcome);
    if (r.completeness == Completeness::restricted) std::cout << " (restricted search)";
    std::cout << "\n";
  }

  auto r = check_history(h, "causality");
  if (r.witness) {
    std::cout << "\ncausality witness\n" << report_to_text(make_report(h, bind("causality"), r));
  }
  return 0;
}
