#pragma once

#include <cstdint>
#include <functional>

namespace fragwave {

// Runs fn(0), ..., fn(n-1), partitioned over up to `threads` workers.
// Callers own determinism: fn must write only to per-index slots so the
// result is independent of the partition.  threads == 0 or 1 runs inline.
void parallel_for_index(std::uint64_t n, unsigned threads,
                        const std::function<void(std::uint64_t)>& fn);

}  // namespace fragwave
