#include "histcl/parallel.hpp"

#include <atomic>
#include <algorithm>
#include <thread>

namespace histcl::parallel {

namespace {
std::atomic<unsigned> g_max_threads{0};

unsigned effective_threads(std::size_t work_items) {
    unsigned cap = g_max_threads.load();
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned n = cap == 0 ? hw : std::min(cap, hw * 4);
    return static_cast<unsigned>(std::min<std::size_t>(n, work_items));
}
}  // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
    unsigned cap = g_max_threads.load();
    return cap == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cap;
}

void for_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = effective_threads(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
    if (chunk_size == 0) chunk_size = 1;
    return (n + chunk_size - 1) / chunk_size;
}

void for_chunks(std::size_t n, std::size_t chunk_size,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (chunk_size == 0) chunk_size = 1;
    std::size_t chunks = chunk_count(n, chunk_size);
    for_index(chunks, [&](std::size_t c) {
        std::size_t begin = c * chunk_size;
        std::size_t end = std::min(n, begin + chunk_size);
        fn(c, begin, end);
    });
}

double tree_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return tree_sum(v.subspan(0, half)) + tree_sum(v.subspan(half));
}

}  // namespace histcl::parallel
