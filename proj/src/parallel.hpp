#pragma once

#include <cstddef>
#include <functional>

namespace espd {

/// Worker count: hardware concurrency, capped by ESP_DESIGN_THREADS.
std::size_t thread_budget();

/// Runs body(i) for i in [0, count) across up to thread_budget() threads.
/// Each index is visited exactly once; callers write into per-index slots
/// and reduce sequentially, so results do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace espd
