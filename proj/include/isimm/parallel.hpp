#pragma once

#include <cstddef>
#include <functional>

namespace isimm {

/// Worker count: ISIMM_THREADS if set to a positive integer, else hardware concurrency.
std::size_t default_thread_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers write
/// results into index-addressed slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace isimm
