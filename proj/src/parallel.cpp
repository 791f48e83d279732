#include "fragwave/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace fragwave {

void parallel_for_index(std::uint64_t n, unsigned threads,
                        const std::function<void(std::uint64_t)>& fn) {
  if (n == 0) return;
  unsigned workers = std::max(1u, threads);
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }

  // Dynamic chunking keeps workers busy when per-index cost is uneven
  // (extinction trials vary wildly in length).
  std::atomic<std::uint64_t> next{0};
  const std::uint64_t chunk = std::max<std::uint64_t>(1, n / (8 * workers));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          std::uint64_t begin = next.fetch_add(chunk);
          if (begin >= n) break;
          std::uint64_t end = std::min(n, begin + chunk);
          for (std::uint64_t i = begin; i < end; ++i) fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fragwave
