#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "histcl/grid.hpp"
#include "histcl/matrix.hpp"

namespace histcl {

/// 1-based bin coordinates, one entry per margin.
using BinIndex = std::vector<std::uint32_t>;

/// Sparse K-dimensional histogram: only occupied bins are stored, keyed in
/// lexicographic bin order so iteration is deterministic.
struct SparseHistogram {
    std::shared_ptr<const BinGrid> grid;
    std::map<BinIndex, std::int64_t> counts;
    std::int64_t total = 0;

    void add(const BinIndex& bin, std::int64_t n = 1);
    void validate() const;
};

/// T histograms over one shared grid, covering contiguous blocks of the
/// original rows. block_spans[t] = [lo, hi) row range of histogram t.
struct HistogramSeries {
    std::shared_ptr<const BinGrid> grid;
    std::vector<SparseHistogram> histograms;
    std::vector<std::pair<std::size_t, std::size_t>> block_spans;

    std::size_t size() const { return histograms.size(); }
    std::int64_t total() const;
    void validate() const;
};

/// Dense projection of a sparse histogram onto an index subset.
/// index_set holds 0-based margin positions, strictly increasing.
struct MarginalHistogram {
    std::vector<std::size_t> index_set;
    std::vector<std::size_t> shape;       // bins per kept margin
    std::vector<std::int64_t> counts;     // row-major over shape
    std::int64_t total = 0;
};

struct AggregateOptions {
    bool clamp = false;            // map out-of-span data into edge bins
    std::size_t chunk_rows = 8192; // fixed chunk size keeps results thread-count independent
};

/// Splits rows into T contiguous blocks whose sizes differ by at most one
/// (the first N mod T blocks take the extra row) and bins each block.
HistogramSeries aggregate(const Matrix& data, std::shared_ptr<const BinGrid> grid, std::size_t T,
                          const AggregateOptions& opts = {});

/// Bin-wise sum of all histograms in the series.
SparseHistogram merge(const HistogramSeries& series);

MarginalHistogram marginalize(const SparseHistogram& hist, const std::vector<std::size_t>& index_set);

/// Column-wise maxima over consecutive disjoint blocks of block_len rows;
/// a trailing partial block is dropped.
Matrix block_maxima(const Matrix& data, std::size_t block_len);

/// Subtracts the least-squares line fitted against the row index.
std::vector<double> detrend(const std::vector<double>& column);

}  // namespace histcl
