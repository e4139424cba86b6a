#include "hobipb/parallel.hpp"

#include "hobipb/common.hpp"

#include <exception>
#include <thread>

namespace hobipb {

std::vector<IndexRange> partition_targets(std::size_t n_targets, int n_workers) {
  if (n_workers < 1) throw DomainError("worker count must be at least 1");
  const auto w = static_cast<std::size_t>(n_workers);
  const std::size_t base = n_targets / w;
  const std::size_t extra = n_targets % w;
  std::vector<IndexRange> out(w);
  std::size_t begin = 0;
  for (std::size_t k = 0; k < w; ++k) {
    const std::size_t len = base + (k < extra ? 1 : 0);
    out[k] = {begin, begin + len};
    begin += len;
  }
  return out;
}

int resolve_workers(int requested) {
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int n_workers, const std::function<void(IndexRange, int)>& body) {
  const auto ranges = partition_targets(n, n_workers);
  if (ranges.size() == 1) {
    body(ranges[0], 0);
    return;
  }
  std::vector<std::exception_ptr> errors(ranges.size());
  {
    std::vector<std::jthread> threads;
    threads.reserve(ranges.size());
    for (std::size_t k = 1; k < ranges.size(); ++k) {
      if (ranges[k].empty()) continue;
      threads.emplace_back([&, k] {
        try {
          body(ranges[k], static_cast<int>(k));
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    try {
      if (!ranges[0].empty()) body(ranges[0], 0);
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace hobipb
