#pragma once

#include <cstddef>
#include <functional>

namespace tdsm {

/// Worker count for a request; 0 means hardware concurrency.
[[nodiscard]] int resolve_threads(int requested) noexcept;

/// Runs body(idx) for idx in [0, count) on up to `threads` workers.
/// Each index must write only its own output slot, so results do not depend
/// on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace tdsm
