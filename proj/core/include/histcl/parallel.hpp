#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace histcl::parallel {

/// Global worker cap. 0 means hardware concurrency. Applies to every
/// parallel loop in the library.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks that are
/// claimed by workers in arbitrary order; fn must only write to state owned
/// by index i, so the outcome is independent of scheduling.
void for_index(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Same, but hands out [begin, end) row ranges of roughly chunk_size rows.
void for_chunks(std::size_t n, std::size_t chunk_size,
                const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& fn);

std::size_t chunk_count(std::size_t n, std::size_t chunk_size);

/// Fixed-order pairwise tree reduction: the result depends only on the order
/// of v, never on how many workers produced it.
double tree_sum(std::span<const double> v);

}  // namespace histcl::parallel
