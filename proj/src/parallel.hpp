#pragma once

#include <functional>

namespace vemove {

// Runs fn(i) for i in [0, n), split into contiguous chunks over worker
// threads (threads == 0 picks the hardware count). Callers that reduce must
// deposit per-index results and combine them sequentially afterwards; nothing
// here reduces across threads, so float output is identical for any count.
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

int default_thread_count();

}  // namespace vemove
