#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hobipb {

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Splits [0, n_targets) into n_workers contiguous ranges whose sizes differ
/// by at most one; the larger ranges come first. n_workers >= 1.
std::vector<IndexRange> partition_targets(std::size_t n_targets, int n_workers);

/// Resolves a requested worker count: values < 1 mean "all hardware threads".
int resolve_workers(int requested);

/// Runs body(range, worker_index) for every partition range, one thread per
/// non-empty range. Bodies must write disjoint outputs. Exceptions thrown by
/// a body are rethrown on the calling thread (first by worker index).
void parallel_for(std::size_t n, int n_workers, const std::function<void(IndexRange, int)>& body);

}  // namespace hobipb
