#include "cra/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace cra {

namespace {
// Nested loops run inline inside a worker.
thread_local bool in_worker = false;
}  // namespace

unsigned thread_count() {
  unsigned requested = 0;
  if (const char* env = std::getenv("CRA_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) requested = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // Unparseable values fall back to auto.
    }
  }
  // hardware_concurrency() is a system call on Linux; ask once.
  static const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  if (requested == 0) requested = hardware;
  return requested;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t grain) {
  const std::size_t workers =
      in_worker ? 1 : std::min<std::size_t>(thread_count(), n / std::max<std::size_t>(grain, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  // Static contiguous chunks.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] {
      in_worker = true;
      for (std::size_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cra
