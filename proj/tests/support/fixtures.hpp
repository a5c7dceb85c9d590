#pragma once

#include <cstdint>

#include "conscheck/history.hpp"

namespace fixtures {

using conscheck::build_history;
using conscheck::History;
using conscheck::Operation;
using conscheck::Value;

inline Value v(std::int64_t x) { return Value(x); }

/// Write then a later read that sees it.
inline History h1() {
  return build_history({Operation::write(1, "pa", "x", v(1), 0, 10),
                        Operation::read(2, "pb", "x", v(1), 20, 30)});
}

/// Write then a later read that misses it.
inline History h2() {
  return build_history({Operation::write(1, "pa", "x", v(1), 0, 10),
                        Operation::read(2, "pb", "x", Value::bottom(), 20, 30)});
}

/// A read inside a write's interval returning a value never written.
inline History h3() {
  return build_history({Operation::write(1, "pa", "x", v(1), 0, 30),
                        Operation::read(2, "pb", "x", v(2), 10, 20)});
}

/// One session writes 1, 2; another reads 2, then 1.
inline History h4() {
  return build_history({Operation::write(1, "pa", "x", v(1), 0, 10),
                        Operation::write(2, "pa", "x", v(2), 20, 30),
                        Operation::read(3, "pb", "x", v(2), 40, 50),
                        Operation::read(4, "pb", "x", v(1), 60, 70)});
}

/// Crossing writes on two objects, each followed by a stale read of the other.
inline History h5() {
  return build_history({Operation::write(1, "pa", "x", v(1), 0, 10),
                        Operation::read(2, "pa", "y", Value::bottom(), 20, 30),
                        Operation::write(3, "pb", "y", v(1), 0, 10),
                        Operation::read(4, "pb", "x", Value::bottom(), 20, 30)});
}

}  // namespace fixtures
