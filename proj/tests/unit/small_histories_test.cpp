#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "conscheck/io.hpp"
#include "support/small_histories.hpp"

using namespace conscheck;

namespace {

// Symmetry-invariant key computed straight from a History: minimum over all
// relabellings and renamings of (returns-before rows, per-op attributes).
using Key = std::vector<int>;

Key canonical_key(const History& h) {
  const auto n = h.size();
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  Key best;
  do {
    for (int g = 0; g < 16; ++g) {
      Key k(2 * n, 0);
      for (std::size_t a = 0; a < n; ++a) {
        const auto& op = h.op(a);
        int proc = (op.proc == "pb") ^ (g & 1);
        int obj = (op.obj == "y");
        int val = op.is_write() ? static_cast<int>(op.ival.as_int()) : (op.oval->is_bottom() ? 0 : static_cast<int>(op.oval->as_int()));
        if (val && ((obj == 0 && (g & 4)) || (obj == 1 && (g & 8)))) val = 3 - val;
        obj ^= (g >> 1) & 1;
        k[p[a]] = proc * 100 + obj * 10 + (op.is_write() ? 5 : 0) + val;
        for (std::size_t b = 0; b < n; ++b)
          if (h.rb().contains(a, b)) k[n + p[a]] |= 1 << p[b];
      }
      if (best.empty() || k < best) best = k;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace

TEST(SmallHistories, LayoutsAreTheIntervalOrders) {
  const std::size_t expected[] = {1, 1, 2, 5, 15};
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_EQ(small_histories::layouts(n).size(), expected[n]);
}

TEST(SmallHistories, OneRepresentativePerClass) {
  for (std::size_t n = 1; n <= 3; ++n) {
    std::set<Key> keys;
    std::size_t count = 0;
    small_histories::for_each(n, [&](const History& h) {
      ++count;
      std::set<std::uint64_t> times;
      for (const auto& op : h.ops()) {
        ASSERT_FALSE(op.pending());
        ASSERT_TRUE(times.insert(op.stime).second);
        ASSERT_TRUE(times.insert(*op.rtime).second);
      }
      ASSERT_TRUE(keys.insert(canonical_key(h)).second) << write_history(h);
    });
    EXPECT_EQ(keys.size(), count);

    // Every labelled history of this size falls into one of the classes.
    std::set<Key> all;
    std::vector<small_histories::Layout> raw;
    small_histories::Layout cur{std::vector<std::uint64_t>(n), std::vector<std::uint64_t>(n), {}};
    std::vector<int> open;
    small_histories::detail::layouts_rec(n, open, 0, 0, cur, raw);
    for (auto& l : raw) {
      l.rb = small_histories::detail::returns_before(l);
      std::size_t total = 1;
      for (std::size_t i = 0; i < n; ++i) total *= 20;
      for (std::size_t code = 0; code < total; ++code) {
        small_histories::Attrs a(n);
        for (std::size_t i = 0, c = code; i < n; ++i, c /= 20) a[i] = static_cast<int>(c % 20);
        auto h = small_histories::build(l, a);
        bool sequential_sessions = true;
        for (std::size_t x = 0; x < n; ++x)
          for (std::size_t y = x + 1; y < n; ++y)
            if (h.op(x).proc == h.op(y).proc && !h.rb().contains(x, y) && !h.rb().contains(y, x))
              sequential_sessions = false;
        if (sequential_sessions) all.insert(canonical_key(h));
      }
    }
    EXPECT_EQ(all, keys) << n;
  }
}
