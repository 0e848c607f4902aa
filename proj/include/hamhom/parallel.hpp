#pragma once

#include <cstddef>
#include <functional>

namespace hamhom {

// Thread count used for parallel maps. Resolution order: explicit set_thread_count,
// the HAMHOM_THREADS environment variable, then std::thread::hardware_concurrency().
int thread_count();
void set_thread_count(int n); // n <= 0 restores the environment/default choice

// Splits [0, n) into contiguous chunks and runs body(begin, end) on each.
// The body must be a pure map over disjoint ranges: results are then identical
// for every thread count and schedule. Reductions are not performed here; callers
// reduce serially over the full range afterwards so output never depends on the split.
// grain is the smallest range worth one thread: work below nt*grain items uses
// fewer threads, below 2*grain it runs inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain = 1);

} // namespace hamhom
