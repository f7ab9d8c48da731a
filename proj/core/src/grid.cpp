#include "histcl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "histcl/error.hpp"

namespace histcl {

BinGrid::BinGrid(std::vector<std::vector<double>> breakpoints) : breaks_(std::move(breakpoints)) {
    if (breaks_.empty()) throw data_error("grid needs at least one margin");
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
        const auto& b = breaks_[k];
        if (b.size() < 2)
            throw data_error("margin " + std::to_string(k) + ": need at least 2 breakpoints");
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (!std::isfinite(b[i]))
                throw data_error("margin " + std::to_string(k) + ": non-finite breakpoint");
            if (i > 0 && !(b[i - 1] < b[i]))
                throw data_error("margin " + std::to_string(k) +
                                 ": breakpoints not strictly increasing");
        }
    }
}

std::uint32_t BinGrid::locate(std::size_t margin, double x) const {
    const auto& b = breaks_[margin];
    if (!(x > b.front()) || x > b.back()) return 0;
    // first breakpoint >= x; x == y_b resolves to bin b, never b+1
    auto it = std::lower_bound(b.begin(), b.end(), x);
    return static_cast<std::uint32_t>(it - b.begin());
}

std::uint32_t BinGrid::locate_clamped(std::size_t margin, double x) const {
    std::uint32_t bin = locate(margin, x);
    if (bin != 0) return bin;
    const auto& b = breaks_[margin];
    return x <= b.front() ? 1u : static_cast<std::uint32_t>(b.size() - 1);
}

BinGrid make_grid(const Matrix& data, const std::vector<std::size_t>& bins_per_margin,
                  const std::optional<std::vector<std::vector<double>>>& explicit_breaks) {
    if (explicit_breaks) return BinGrid(*explicit_breaks);

    if (data.rows < 1) throw data_error("make_grid: empty data");
    if (bins_per_margin.size() != data.cols)
        throw data_error("make_grid: bins_per_margin size does not match data columns");

    std::vector<std::vector<double>> breaks(data.cols);
    for (std::size_t k = 0; k < data.cols; ++k) {
        std::size_t nbins = bins_per_margin[k];
        if (nbins < 1) throw data_error("make_grid: bins_per_margin must be >= 1");
        double lo = data(0, k), hi = data(0, k);
        for (std::size_t r = 0; r < data.rows; ++r) {
            double v = data(r, k);
            if (!std::isfinite(v))
                throw data_error("make_grid: non-finite value at row " + std::to_string(r) +
                                 ", margin " + std::to_string(k));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double range = hi - lo;
        double delta = range > 0 ? 1e-9 * range : 1e-9;
        double start = lo - delta;
        auto& b = breaks[k];
        b.resize(nbins + 1);
        for (std::size_t i = 0; i <= nbins; ++i)
            b[i] = start + (hi - start) * static_cast<double>(i) / static_cast<double>(nbins);
        b.back() = hi;  // exact upper edge
    }
    return BinGrid(std::move(breaks));
}

BinGrid make_grid(const Matrix& data, std::size_t bins_per_margin,
                  const std::optional<std::vector<std::vector<double>>>& explicit_breaks) {
    return make_grid(data, std::vector<std::size_t>(data.cols, bins_per_margin), explicit_breaks);
}

}  // namespace histcl
