//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/parallel.hpp
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ltube
{
//---------------------------------------------------------------------------//
//! Resolve a worker count, where 0 means one per hardware thread
inline unsigned resolve_workers(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

//---------------------------------------------------------------------------//
/*!
 * Split [0, n) into fixed blocks and evaluate \c fn(block, begin, end) on a
 * pool of workers.
 *
 * Block boundaries depend only on \c n and \c block_size, and each result
 * lands in its own slot, so callers that reduce the returned vector in order
 * get the same answer for any worker count.
 */
template<class F>
auto map_blocks(std::uint64_t n,
                std::uint64_t block_size,
                unsigned workers,
                F&& fn)
{
    using Result = decltype(fn(std::uint64_t{}, std::uint64_t{},
                               std::uint64_t{}));
    block_size = std::max<std::uint64_t>(block_size, 1);
    std::uint64_t const n_blocks = (n + block_size - 1) / block_size;
    std::vector<Result> results(n_blocks);

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;)
        {
            std::uint64_t const b = next.fetch_add(1);
            if (b >= n_blocks)
                return;
            try
            {
                std::uint64_t const begin = b * block_size;
                std::uint64_t const end = std::min(n, begin + block_size);
                results[b] = fn(b, begin, end);
            }
            catch (...)
            {
                std::lock_guard lock{error_mutex};
                if (!error)
                    error = std::current_exception();
                next.store(n_blocks);
            }
        }
    };

    unsigned const n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(resolve_workers(workers), n_blocks));
    if (n_threads <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
    return results;
}

//---------------------------------------------------------------------------//
}  // namespace ltube
