#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "histcl/matrix.hpp"

namespace histcl {

/// Fixed per-margin breakpoints. Margin k has bins() strictly increasing
/// breakpoints y_0 < ... < y_B; bin b (1-based) covers (y_{b-1}, y_b].
class BinGrid {
public:
    explicit BinGrid(std::vector<std::vector<double>> breakpoints);

    std::size_t dims() const { return breaks_.size(); }
    std::size_t bins(std::size_t margin) const { return breaks_[margin].size() - 1; }
    const std::vector<double>& breakpoints(std::size_t margin) const { return breaks_[margin]; }

    /// 1-based bin index under the half-open-right rule; 0 when x falls
    /// outside (y_0, y_B]. A datum exactly on a breakpoint lands in the
    /// bin to its left.
    std::uint32_t locate(std::size_t margin, double x) const;

    /// Same, but out-of-span data is mapped into the nearest edge bin.
    std::uint32_t locate_clamped(std::size_t margin, double x) const;

private:
    std::vector<std::vector<double>> breaks_;
};

/// Builds a grid for data. Without explicit breakpoints, margin k gets
/// bins_per_margin[k] equal-width bins spanning [min_k - delta_k, max_k],
/// delta_k = 1e-9 * range (or 1e-9 when the range is zero), so every datum
/// lands in a bin under the half-open-right rule.
BinGrid make_grid(const Matrix& data, const std::vector<std::size_t>& bins_per_margin,
                  const std::optional<std::vector<std::vector<double>>>& explicit_breaks = std::nullopt);

/// Scalar bin count broadcast to every margin.
BinGrid make_grid(const Matrix& data, std::size_t bins_per_margin,
                  const std::optional<std::vector<std::vector<double>>>& explicit_breaks = std::nullopt);

}  // namespace histcl
