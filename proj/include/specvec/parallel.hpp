#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "specvec/matrix_core.hpp"

namespace specvec {

/// Worker count to use: an explicit request wins, then the SPECVEC_THREADS
/// environment variable, then the hardware concurrency. Never below 1.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPECVEC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Run fn(i) for i in [0, count) on up to `threads` workers with a static
/// contiguous partition. Each index must write only its own output slot, so
/// results do not depend on the worker count. If any call throws, the
/// exception from the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(Index count, unsigned threads, Fn&& fn) {
  if (count <= 0) return;
  const Index workers = std::min<Index>(static_cast<Index>(std::max(1u, threads)), count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  auto run_range = [&](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run_range(0, count);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w)
      pool.emplace_back(run_range, count * w / workers, count * (w + 1) / workers);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace specvec
