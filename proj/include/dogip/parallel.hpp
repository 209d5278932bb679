#pragma once

/// @file parallel.hpp
/// Static chunked element loops. Worker w always gets the w-th contiguous
/// block, and callers reduce per-worker results in worker order, so output
/// is deterministic for a fixed worker count. One worker means plain serial
/// execution in element order.

#include "dogip/core.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace dogip
{

namespace detail
{
inline std::atomic<bool>& serial_flag()
{
    static std::atomic<bool> flag{false};
    return flag;
}
} // namespace detail

/// Forces single-threaded execution process-wide (the CLI's --serial).
inline void set_serial(bool serial) { detail::serial_flag() = serial; }

/// 1 in serial mode, else DOGIP_THREADS if set and positive, else the
/// hardware concurrency.
inline int worker_count()
{
    if (detail::serial_flag())
        return 1;
    if (const char* env = std::getenv("DOGIP_THREADS"))
    {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls f(worker, begin, end) on `workers` contiguous blocks of [0, n).
template <typename F>
void parallel_chunks(GlobalIndex n, int workers, F&& f)
{
    workers = static_cast<int>(std::max<GlobalIndex>(1, std::min<GlobalIndex>(workers, n)));
    if (workers == 1)
    {
        f(0, GlobalIndex(0), n);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
        {
            const GlobalIndex begin = n * w / workers, end = n * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                try
                {
                    f(w, begin, end);
                }
                catch (...)
                {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace dogip
