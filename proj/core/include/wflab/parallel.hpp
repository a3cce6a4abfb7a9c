#pragma once

#include <functional>

namespace wflab {

// Run fn(0..count-1), across hardware threads when parallel is set. The
// callables must be independent; the first exception is rethrown.
void parallel_for(int count, const std::function<void(int)>& fn, bool parallel = true);

}  // namespace wflab
