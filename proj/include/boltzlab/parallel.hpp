#pragma once

#include <cstddef>
#include <functional>

namespace boltzlab {

/// Worker count used by the operators; 0 or less restores the hardware default.
void set_num_threads(int n);
int num_threads();

/// Splits [0, n) into contiguous blocks, one per worker. fn(begin, end).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)> &fn, int threads = 0);

}  // namespace boltzlab
