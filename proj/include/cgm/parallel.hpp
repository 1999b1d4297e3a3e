#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "cgm/lpp.hpp"

namespace cgm {

/// Evaluates fn(r, scratch) for r in [0, reps) on `workers` threads and
/// returns the results indexed by replicate. Each worker owns one scratch
/// object. Output does not depend on the worker count.
template <class Result, class Fn>
std::vector<Result> map_replicates(std::uint64_t reps, unsigned workers, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(reps));
  if (workers <= 1 || reps < 2) {
    RollingScratch scratch;
    for (std::uint64_t r = 0; r < reps; ++r) out[static_cast<std::size_t>(r)] = fn(r, scratch);
    return out;
  }
  constexpr std::uint64_t kChunk = 64;
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(workers, reps));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&] {
        RollingScratch scratch;
        try {
          for (;;) {
            const std::uint64_t begin = next.fetch_add(kChunk);
            if (begin >= reps) break;
            const std::uint64_t end = std::min(reps, begin + kChunk);
            for (std::uint64_t r = begin; r < end; ++r) out[static_cast<std::size_t>(r)] = fn(r, scratch);
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(reps);
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace cgm
