#ifndef BNEB_PARALLEL_HPP
#define BNEB_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace bneb {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Items are claimed dynamically; callers write results by index
/// so the outcome does not depend on the schedule. The first exception thrown
/// by any item is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace bneb

#endif  // BNEB_PARALLEL_HPP
