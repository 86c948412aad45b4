#pragma once

#include <functional>

namespace stereoct {

/// Caps the number of worker threads used by row-parallel loops.
/// 0 restores the default (hardware concurrency).
void set_max_workers(int n);
int max_workers();

/// Runs fn(i) for i in [begin, end). Rows are split into contiguous blocks,
/// one per worker, so writes to disjoint rows never race. Reductions are
/// kept out of this helper; callers sum serially for determinism.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace stereoct
