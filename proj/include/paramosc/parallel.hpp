#pragma once

#include <cstddef>
#include <functional>

namespace paramosc {

/// Runs body(0..n-1) across hardware threads in contiguous chunks.
/// Falls back to a plain loop on single-core hosts or tiny ranges.
/// The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace paramosc
