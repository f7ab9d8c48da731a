#include "histcl/histogram.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "histcl/error.hpp"
#include "histcl/parallel.hpp"

namespace histcl {

void SparseHistogram::add(const BinIndex& bin, std::int64_t n) {
    if (n == 0) return;
    auto [it, inserted] = counts.try_emplace(bin, n);
    if (!inserted) it->second += n;
    if (it->second == 0) counts.erase(it);
    total += n;
}

void SparseHistogram::validate() const {
    if (!grid) throw data_error("histogram has no grid");
    std::int64_t sum = 0;
    for (const auto& [bin, n] : counts) {
        if (bin.size() != grid->dims()) throw data_error("bin index dimension mismatch");
        for (std::size_t k = 0; k < bin.size(); ++k)
            if (bin[k] < 1 || bin[k] > grid->bins(k))
                throw data_error("bin index out of range on margin " + std::to_string(k));
        if (n <= 0) throw data_error("stored bin count must be positive");
        sum += n;
    }
    if (sum != total) throw data_error("histogram total does not match stored counts");
}

std::int64_t HistogramSeries::total() const {
    std::int64_t n = 0;
    for (const auto& h : histograms) n += h.total;
    return n;
}

void HistogramSeries::validate() const {
    if (!grid) throw data_error("series has no grid");
    if (histograms.size() != block_spans.size())
        throw data_error("series histogram/span count mismatch");
    std::size_t expect = 0;
    for (std::size_t t = 0; t < histograms.size(); ++t) {
        if (histograms[t].grid != grid) throw data_error("series histograms must share one grid");
        histograms[t].validate();
        const auto& [lo, hi] = block_spans[t];
        if (lo != expect || hi < lo) throw data_error("block spans must be contiguous and ordered");
        if (static_cast<std::int64_t>(hi - lo) != histograms[t].total)
            throw data_error("block span size does not match histogram total");
        expect = hi;
    }
}

namespace {

BinIndex locate_row(const Matrix& data, const BinGrid& grid, std::size_t row, bool clamp) {
    BinIndex bin(data.cols);
    for (std::size_t k = 0; k < data.cols; ++k) {
        double v = data(row, k);
        if (!std::isfinite(v))
            throw data_error("non-finite value at row " + std::to_string(row) + ", margin " +
                             std::to_string(k));
        std::uint32_t b = clamp ? grid.locate_clamped(k, v) : grid.locate(k, v);
        if (b == 0) {
            std::ostringstream msg;
            msg << "datum outside grid: row " << row << ", margin " << k << ", value " << v;
            throw data_error(msg.str());
        }
        bin[k] = b;
    }
    return bin;
}

}  // namespace

HistogramSeries aggregate(const Matrix& data, std::shared_ptr<const BinGrid> grid, std::size_t T,
                          const AggregateOptions& opts) {
    if (!grid) throw data_error("aggregate: null grid");
    if (grid->dims() != data.cols) throw data_error("aggregate: grid/data dimension mismatch");
    if (T < 1) throw data_error("aggregate: T must be >= 1");
    if (T > data.rows) throw data_error("aggregate: T exceeds number of rows");

    HistogramSeries series;
    series.grid = grid;
    series.histograms.resize(T);
    series.block_spans.resize(T);
    std::size_t base = data.rows / T, extra = data.rows % T, row = 0;
    for (std::size_t t = 0; t < T; ++t) {
        std::size_t len = base + (t < extra ? 1 : 0);
        series.block_spans[t] = {row, row + len};
        series.histograms[t].grid = grid;
        row += len;
    }

    // Work units are chunk-aligned pieces that never straddle a block
    // boundary. Each unit fills its own map; units are merged in fixed
    // order, so the result is identical for any worker count.
    std::size_t chunk = opts.chunk_rows == 0 ? 1 : opts.chunk_rows;
    struct Unit {
        std::size_t t, begin, end;
    };
    std::vector<Unit> units;
    for (std::size_t t = 0; t < T; ++t) {
        auto [lo, hi] = series.block_spans[t];
        std::size_t pos = lo;
        while (pos < hi) {
            std::size_t next = std::min(hi, (pos / chunk + 1) * chunk);
            units.push_back({t, pos, next});
            pos = next;
        }
    }
    std::vector<std::map<BinIndex, std::int64_t>> local(units.size());
    std::vector<std::string> failure(units.size());
    parallel::for_index(units.size(), [&](std::size_t u) {
        try {
            auto& m = local[u];
            for (std::size_t r = units[u].begin; r < units[u].end; ++r) ++m[locate_row(data, *grid, r, opts.clamp)];
        } catch (const std::exception& e) {
            failure[u] = e.what();
        }
    });
    for (const auto& f : failure)
        if (!f.empty()) throw data_error(f);
    for (std::size_t u = 0; u < units.size(); ++u)
        for (const auto& [bin, n] : local[u]) series.histograms[units[u].t].add(bin, n);

    series.validate();
    return series;
}

SparseHistogram merge(const HistogramSeries& series) {
    SparseHistogram out;
    out.grid = series.grid;
    for (const auto& h : series.histograms)
        for (const auto& [bin, n] : h.counts) out.add(bin, n);
    return out;
}

MarginalHistogram marginalize(const SparseHistogram& hist, const std::vector<std::size_t>& index_set) {
    if (!hist.grid) throw data_error("marginalize: histogram has no grid");
    const BinGrid& grid = *hist.grid;
    if (index_set.empty()) throw data_error("marginalize: empty index set");
    for (std::size_t j = 0; j < index_set.size(); ++j) {
        if (index_set[j] >= grid.dims()) throw data_error("marginalize: index out of range");
        if (j > 0 && index_set[j] <= index_set[j - 1])
            throw data_error("marginalize: index set must be strictly increasing");
    }

    MarginalHistogram out;
    out.index_set = index_set;
    out.shape.reserve(index_set.size());
    std::size_t cells = 1;
    for (std::size_t k : index_set) {
        out.shape.push_back(grid.bins(k));
        cells *= grid.bins(k);
    }
    out.counts.assign(cells, 0);
    for (const auto& [bin, n] : hist.counts) {
        std::size_t flat = 0;
        for (std::size_t j = 0; j < index_set.size(); ++j)
            flat = flat * out.shape[j] + (bin[index_set[j]] - 1);
        out.counts[flat] += n;
        out.total += n;
    }
    return out;
}

Matrix block_maxima(const Matrix& data, std::size_t block_len) {
    if (block_len < 1) throw data_error("block_maxima: block_len must be >= 1");
    if (data.rows < block_len) throw data_error("block_maxima: fewer rows than block_len");
    std::size_t out_rows = data.rows / block_len;
    Matrix out(out_rows, data.cols);
    for (std::size_t r = 0; r < out_rows; ++r)
        for (std::size_t k = 0; k < data.cols; ++k) {
            double m = data(r * block_len, k);
            for (std::size_t i = 1; i < block_len; ++i)
                m = std::max(m, data(r * block_len + i, k));
            out(r, k) = m;
        }
    return out;
}

std::vector<double> detrend(const std::vector<double>& column) {
    std::size_t n = column.size();
    if (n < 2) throw data_error("detrend: need at least 2 values");
    double mean_t = (static_cast<double>(n) - 1.0) / 2.0;
    double mean_y = 0.0;
    for (double v : column) mean_y += v;
    mean_y /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dt = static_cast<double>(i) - mean_t;
        sxx += dt * dt;
        sxy += dt * (column[i] - mean_y);
    }
    double slope = sxy / sxx;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = column[i] - (mean_y + slope * (static_cast<double>(i) - mean_t));
    return out;
}

}  // namespace histcl
