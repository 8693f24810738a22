#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hess2 {

// Splits [0, count) into `workers` contiguous chunks; chunk c runs fn(begin, end).
// Chunk boundaries depend only on (count, workers). If chunks throw, the
// exception from the lowest-numbered chunk is rethrown after all finish.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1,
                                                  std::max<std::size_t>(count, 1));
    if (w == 1) {
        fn(std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + w - 1) / w;
    std::vector<std::exception_ptr> errors(w);
    {
        std::vector<std::jthread> pool;
        pool.reserve(w - 1);
        for (std::size_t c = 1; c < w; ++c) {
            const std::size_t begin = std::min(count, c * chunk);
            const std::size_t end = std::min(count, begin + chunk);
            pool.emplace_back([&fn, &errors, c, begin, end] {
                try {
                    fn(begin, end);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        }
        try {
            fn(std::size_t{0}, std::min(count, chunk));
        } catch (...) {
            errors[0] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace hess2
