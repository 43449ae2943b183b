#pragma once

#include <cstddef>
#include <functional>

namespace cra {

/// Worker count: CRA_THREADS if set and positive, hardware concurrency when
/// CRA_THREADS=0 or unset.
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is independent; results must be
/// written to disjoint locations so the output does not depend on scheduling.
/// Every worker gets at least `grain` indices; small loops and loops nested
/// inside a worker run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t grain = 1);

}  // namespace cra
