#include "hobipb/common.hpp"
#include "hobipb/parallel.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

using namespace hobipb;

namespace {

std::vector<std::size_t> sizes(const std::vector<IndexRange>& r) {
  std::vector<std::size_t> s;
  for (const auto& x : r) s.push_back(x.size());
  return s;
}

}  // namespace

TEST(Partition, Examples) {
  EXPECT_EQ(sizes(partition_targets(10, 3)), (std::vector<std::size_t>{4, 3, 3}));
  EXPECT_EQ(sizes(partition_targets(5, 8)), (std::vector<std::size_t>{1, 1, 1, 1, 1, 0, 0, 0}));
  EXPECT_EQ(sizes(partition_targets(0, 4)), (std::vector<std::size_t>{0, 0, 0, 0}));
  EXPECT_THROW(partition_targets(3, 0), DomainError);
}

TEST(Partition, CoversContiguouslyWithBalancedSizes) {
  for (std::size_t n : {1u, 7u, 64u, 1001u})
    for (int w = 1; w <= 9; ++w) {
      const auto r = partition_targets(n, w);
      ASSERT_EQ(r.size(), static_cast<std::size_t>(w));
      std::size_t next = 0, lo = n, hi = 0;
      for (const auto& x : r) {
        EXPECT_EQ(x.begin, next);
        next = x.end;
        lo = std::min(lo, x.size());
        hi = std::max(hi, x.size());
      }
      EXPECT_EQ(next, n);
      EXPECT_LE(hi - lo, 1u);
    }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](IndexRange r, int) {
    for (std::size_t i = r.begin; i < r.end; ++i) ++hits[i];
  });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(ParallelFor, EmptyRangesAreSkipped) {
  std::atomic<int> calls{0};
  parallel_for(2, 8, [&](IndexRange r, int) {
    EXPECT_FALSE(r.empty());
    ++calls;
  });
  EXPECT_EQ(calls.load(), 2);
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(100, 3, [](IndexRange r, int w) {
                 if (w == 2) throw std::runtime_error("boom " + std::to_string(r.begin));
               }),
               std::runtime_error);
}

TEST(ResolveWorkers, NonPositiveMeansHardware) {
  EXPECT_EQ(resolve_workers(3), 3);
  EXPECT_GE(resolve_workers(0), 1);
  EXPECT_GE(resolve_workers(-2), 1);
}
