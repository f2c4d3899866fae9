#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace fracscale::detail {

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested == 0) {
        requested = std::max(1u, std::thread::hardware_concurrency());
    }
    return requested;
}

// Runs fn(i) for i in [0, count), splitting the range into contiguous blocks.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = std::min(resolve_threads(threads), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    const std::size_t block = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * block;
        const std::size_t end = std::min(count, begin + block);
        if (begin >= end) break;
        workers.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
}

// Advances a row-major multi-index; returns false after the last index.
inline bool next_index(std::vector<std::size_t>& index, const std::vector<std::size_t>& shape,
                       std::size_t first_dim = 0) {
    for (std::size_t d = index.size(); d-- > first_dim;) {
        if (++index[d] < shape[d]) return true;
        index[d] = 0;
    }
    return false;
}

} // namespace fracscale::detail
