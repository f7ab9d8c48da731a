#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "histcl/histogram.hpp"
#include "histcl/matrix.hpp"
#include "histcl/smith.hpp"

namespace histcl {

/// Which j-dimensional marginal events enter the composite likelihood.
/// An empty tuple list means all of I_j = { i : i subset of {0..K-1}, |i| = j }.
struct CompositeConfig {
    int order = 2;  // j, 2 or 3
    std::vector<std::vector<std::size_t>> tuples;
    double probability_floor = 1e-300;

    void validate(std::size_t K) const;
    std::vector<std::vector<std::size_t>> expand(std::size_t K) const;
};

std::vector<std::vector<std::size_t>> all_index_tuples(std::size_t K, int j);

/// Log-likelihood kernel (multinomial coefficient dropped) plus the number
/// of bin terms where the probability floor had to step in.
struct LogLikValue {
    double value = 0.0;
    long long floored_bins = 0;
};

/// Model probability of marginal bin `bin` (1-based coordinates) for the
/// 2- or 3-margin index_set, by inclusion-exclusion over the rectangle
/// corners. Values in [-1e-10, 0) clamp to zero; anything lower throws.
double bin_probability(const SmithParams& params, const SiteLayout& layout, const BinGrid& grid,
                       const std::vector<std::size_t>& index_set, const BinIndex& bin);

/// Sum over occupied bins of s * log(max(P, floor)).
LogLikValue symbolic_marginal_loglik(const MarginalHistogram& marg, const SmithParams& params,
                                     const SiteLayout& layout, const BinGrid& grid,
                                     double probability_floor = 1e-300);

/// Reusable evaluator for one histogram series: marginal counts and the
/// corner layout of every tuple are computed once (they do not depend on
/// theta); each evaluation prices the corners for one parameter point.
class SymbolicObjective {
public:
    SymbolicObjective(const HistogramSeries& series, const SiteLayout& layout, CompositeConfig config);

    /// Total over histograms and tuples.
    LogLikValue value(const SmithParams& params) const;

    /// Per-histogram totals (summed over tuples), for score-based variance
    /// estimation.
    std::vector<double> per_histogram(const SmithParams& params) const;

    const CompositeConfig& config() const { return config_; }
    const SiteLayout& layout() const { return layout_; }
    std::size_t histogram_count() const { return T_; }

private:
    struct TupleData {
        std::vector<std::size_t> margins;
        std::vector<std::size_t> ncorners;                 // breakpoints per dim
        std::vector<std::uint64_t> bins;                   // sorted flat occupied bins
        std::vector<std::int64_t> merged_counts;           // aligned with bins
        std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> per_t;
        bool dense = true;                                 // corner grid strategy
        std::vector<std::uint64_t> corners;                // sparse mode: needed corners
        std::vector<std::uint32_t> corner_ref;             // 2^j refs per bin
    };

    void tuple_log_probs(const TupleData& td, const SmithParams& params,
                         std::vector<double>& logp, std::vector<std::uint8_t>& floored) const;

    std::shared_ptr<const BinGrid> grid_;
    SiteLayout layout_;
    CompositeConfig config_;
    std::vector<TupleData> tuples_;
    std::size_t T_ = 0;
};

/// value() over a freshly built evaluator; the convenient form for one-off use.
LogLikValue symbolic_composite_loglik(const HistogramSeries& series, const SmithParams& params,
                                      const SiteLayout& layout, const CompositeConfig& config);

/// Micro-data composite log-likelihood. Each j-dimensional marginal density
/// is a central finite difference of the joint distribution function over a
/// box with half-width 1e-4*(1+|x|) per coordinate.
class ClassicObjective {
public:
    ClassicObjective(Matrix data, SiteLayout layout, CompositeConfig config);

    LogLikValue value(const SmithParams& params) const;

    /// Per-observation totals (summed over tuples).
    std::vector<double> per_row(const SmithParams& params) const;

    const CompositeConfig& config() const { return config_; }
    const SiteLayout& layout() const { return layout_; }
    std::size_t row_count() const { return data_.rows; }

private:
    Matrix data_;
    SiteLayout layout_;
    CompositeConfig config_;
    std::vector<std::vector<std::size_t>> tuples_;
};

LogLikValue classic_composite_loglik(const Matrix& data, const SmithParams& params,
                                     const SiteLayout& layout, const CompositeConfig& config);

/// Term counts for the composite likelihood variants: the classic sum has
/// N * C(K,j) terms, the symbolic one at most B^j * C(K,j); the actual
/// count is the number of occupied marginal bins over tuples and histograms.
struct TermCounts {
    long long classic = 0;
    long long symbolic_max = 0;
    std::optional<long long> symbolic_actual;
};

TermCounts count_terms(long long N, long long K, int j, std::optional<long long> B = std::nullopt,
                       const HistogramSeries* series = nullptr);

}  // namespace histcl
