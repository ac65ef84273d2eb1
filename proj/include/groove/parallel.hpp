#pragma once

#include <cstddef>
#include <functional>

namespace groove {

// Worker cap. Reads GROOVESOLVE_THREADS on first use; 0 or unset means
// hardware concurrency. set_max_threads overrides the environment (0 restores
// the automatic choice).
int max_threads();
void set_max_threads(int n);

// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker and
// writes only its own outputs, so results do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace groove
