#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace hvlab {

/// Worker count to use when the caller asks for "all available".
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Splits [0, total) into `workers` contiguous chunks, runs `body(begin, end)`
/// on each, and returns the per-chunk results in chunk order. Exceptions from
/// the lowest-indexed failing chunk are rethrown.
template <typename Body>
auto run_chunks(std::uint64_t total, unsigned workers, Body body) {
  using Result = decltype(body(std::uint64_t{}, std::uint64_t{}));
  workers = std::max(1u, workers);
  if (static_cast<std::uint64_t>(workers) > total) workers = static_cast<unsigned>(std::max<std::uint64_t>(total, 1));
  std::vector<Result> results(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto chunk = [&](unsigned w) {
    const std::uint64_t begin = total * w / workers;
    const std::uint64_t end = total * (w + 1) / workers;
    try {
      results[w] = body(begin, end);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    chunk(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(chunk, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace hvlab
