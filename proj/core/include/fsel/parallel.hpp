#ifndef FSEL_PARALLEL_HPP_
#define FSEL_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace fsel {

/// Effective worker count: min(hardware, FUNNEL_SELECT_THREADS if set,
/// programmatic cap if set). At least 1.
unsigned thread_cap();

/// Programmatic override (0 = no override). Mainly for tests; the env
/// variable wins at process start, this wins afterwards.
void set_thread_cap(unsigned n);

/// Runs fn(i) for i in [0, n). Work is chunked over the worker threads;
/// results must be written to per-index slots so the outcome is
/// independent of the schedule. Exceptions are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fsel

#endif  // FSEL_PARALLEL_HPP_
