#include "histcl/likelihood.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_set>

#include "histcl/error.hpp"
#include "histcl/parallel.hpp"

namespace histcl {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double kNegativeProbTol = -1e-10;
}  // namespace

void CompositeConfig::validate(std::size_t K) const {
    if (order != 2 && order != 3) throw data_error("composite order must be 2 or 3");
    for (const auto& t : tuples) {
        if (t.size() != static_cast<std::size_t>(order))
            throw data_error("composite tuple length does not match order");
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (t[j] >= K) throw data_error("composite tuple index out of range");
            if (j > 0 && t[j] <= t[j - 1])
                throw data_error("composite tuple must be strictly increasing");
        }
    }
}

std::vector<std::vector<std::size_t>> all_index_tuples(std::size_t K, int j) {
    std::vector<std::vector<std::size_t>> out;
    if (j == 2) {
        for (std::size_t a = 0; a + 1 < K; ++a)
            for (std::size_t b = a + 1; b < K; ++b) out.push_back({a, b});
    } else if (j == 3) {
        for (std::size_t a = 0; a + 2 < K; ++a)
            for (std::size_t b = a + 1; b + 1 < K; ++b)
                for (std::size_t c = b + 1; c < K; ++c) out.push_back({a, b, c});
    } else {
        throw data_error("composite order must be 2 or 3");
    }
    return out;
}

std::vector<std::vector<std::size_t>> CompositeConfig::expand(std::size_t K) const {
    validate(K);
    return tuples.empty() ? all_index_tuples(K, order) : tuples;
}

double bin_probability(const SmithParams& params, const SiteLayout& layout, const BinGrid& grid,
                       const std::vector<std::size_t>& index_set, const BinIndex& bin) {
    std::size_t j = index_set.size();
    if (j != 2 && j != 3) throw data_error("bin_probability: index set must have 2 or 3 margins");
    if (bin.size() != j) throw data_error("bin_probability: bin/index set size mismatch");
    for (std::size_t d = 0; d < j; ++d) {
        if (index_set[d] >= grid.dims()) throw data_error("bin_probability: margin out of range");
        if (bin[d] < 1 || bin[d] > grid.bins(index_set[d]))
            throw data_error("bin_probability: bin index out of range");
    }

    double p = 0.0;
    std::vector<double> y(j);
    for (unsigned mask = 0; mask < (1u << j); ++mask) {
        for (std::size_t d = 0; d < j; ++d) {
            const auto& breaks = grid.breakpoints(index_set[d]);
            y[d] = (mask >> d) & 1u ? breaks[bin[d] - 1] : breaks[bin[d]];
        }
        double sign = std::popcount(mask) % 2 == 0 ? 1.0 : -1.0;
        p += sign * smith_cdf(y, index_set, params, layout);
    }
    if (p < kNegativeProbTol) {
        std::ostringstream msg;
        msg << "bin probability " << p << " below tolerance; distribution function inaccurate";
        throw numeric_error(msg.str());
    }
    return std::clamp(p, 0.0, 1.0);
}

LogLikValue symbolic_marginal_loglik(const MarginalHistogram& marg, const SmithParams& params,
                                     const SiteLayout& layout, const BinGrid& grid,
                                     double probability_floor) {
    if (marg.total == 0) throw data_error("symbolic_marginal_loglik: empty histogram");
    LogLikValue out;
    std::size_t j = marg.index_set.size();
    BinIndex bin(j);
    for (std::size_t flat = 0; flat < marg.counts.size(); ++flat) {
        std::int64_t n = marg.counts[flat];
        if (n == 0) continue;
        std::size_t rest = flat;
        for (std::size_t d = j; d-- > 0;) {
            bin[d] = static_cast<std::uint32_t>(rest % marg.shape[d]) + 1;
            rest /= marg.shape[d];
        }
        double p = bin_probability(params, layout, grid, marg.index_set, bin);
        if (p < probability_floor) {
            p = probability_floor;
            ++out.floored_bins;
        }
        out.value += static_cast<double>(n) * std::log(p);
    }
    return out;
}

SymbolicObjective::SymbolicObjective(const HistogramSeries& series, const SiteLayout& layout,
                                     CompositeConfig config)
    : grid_(series.grid), layout_(layout), config_(std::move(config)) {
    if (!grid_) throw data_error("SymbolicObjective: series has no grid");
    if (layout_.size() != grid_->dims())
        throw data_error("SymbolicObjective: layout/grid dimension mismatch");
    layout_.validate();
    T_ = series.size();
    if (T_ == 0) throw data_error("SymbolicObjective: empty series");

    auto tuple_list = config_.expand(grid_->dims());
    std::size_t j = static_cast<std::size_t>(config_.order);
    tuples_.resize(tuple_list.size());

    parallel::for_index(tuple_list.size(), [&](std::size_t ti) {
        TupleData& td = tuples_[ti];
        td.margins = tuple_list[ti];
        td.ncorners.resize(j);
        std::vector<std::size_t> shape(j);
        for (std::size_t d = 0; d < j; ++d) {
            shape[d] = grid_->bins(td.margins[d]);
            td.ncorners[d] = shape[d] + 1;
        }

        // project every histogram onto this tuple, keeping sparse counts
        std::map<std::uint64_t, std::int64_t> merged;
        std::vector<std::vector<std::pair<std::uint64_t, std::int64_t>>> raw(T_);
        for (std::size_t t = 0; t < T_; ++t) {
            std::map<std::uint64_t, std::int64_t> local;
            for (const auto& [bin, n] : series.histograms[t].counts) {
                std::uint64_t flat = 0;
                for (std::size_t d = 0; d < j; ++d)
                    flat = flat * shape[d] + (bin[td.margins[d]] - 1);
                local[flat] += n;
            }
            raw[t].assign(local.begin(), local.end());
            for (const auto& [flat, n] : local) merged[flat] += n;
        }
        td.bins.reserve(merged.size());
        td.merged_counts.reserve(merged.size());
        for (const auto& [flat, n] : merged) {
            td.bins.push_back(flat);
            td.merged_counts.push_back(n);
        }
        td.per_t.resize(T_);
        for (std::size_t t = 0; t < T_; ++t) {
            td.per_t[t].reserve(raw[t].size());
            for (const auto& [flat, n] : raw[t]) {
                auto it = std::lower_bound(td.bins.begin(), td.bins.end(), flat);
                td.per_t[t].push_back({static_cast<std::uint32_t>(it - td.bins.begin()), n});
            }
        }

        // corner plan: full grid when the occupied bins touch most of it,
        // otherwise only the corners adjacent to occupied bins
        std::size_t full = 1;
        for (std::size_t d = 0; d < j; ++d) full *= td.ncorners[d];
        std::size_t ncorner_per_bin = std::size_t{1} << j;
        td.dense = td.bins.size() * ncorner_per_bin * 2 >= full;

        auto corner_of = [&](std::uint64_t bin_flat, unsigned mask) {
            std::uint64_t corner = 0;
            std::uint64_t rest = bin_flat;
            std::uint64_t coord[3];
            for (std::size_t d = j; d-- > 0;) {
                coord[d] = rest % shape[d];
                rest /= shape[d];
            }
            for (std::size_t d = 0; d < j; ++d) {
                std::uint64_t u = coord[d] + (((mask >> d) & 1u) ? 0 : 1);  // bit set = low side
                corner = corner * td.ncorners[d] + u;
            }
            return corner;
        };

        td.corner_ref.resize(td.bins.size() * ncorner_per_bin);
        if (td.dense) {
            for (std::size_t i = 0; i < td.bins.size(); ++i)
                for (unsigned mask = 0; mask < ncorner_per_bin; ++mask)
                    td.corner_ref[i * ncorner_per_bin + mask] =
                        static_cast<std::uint32_t>(corner_of(td.bins[i], mask));
        } else {
            std::vector<std::uint64_t> needed;
            needed.reserve(td.bins.size() * ncorner_per_bin);
            for (std::size_t i = 0; i < td.bins.size(); ++i)
                for (unsigned mask = 0; mask < ncorner_per_bin; ++mask)
                    needed.push_back(corner_of(td.bins[i], mask));
            std::sort(needed.begin(), needed.end());
            needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
            td.corners = std::move(needed);
            for (std::size_t i = 0; i < td.bins.size(); ++i)
                for (unsigned mask = 0; mask < ncorner_per_bin; ++mask) {
                    auto it = std::lower_bound(td.corners.begin(), td.corners.end(),
                                               corner_of(td.bins[i], mask));
                    td.corner_ref[i * ncorner_per_bin + mask] =
                        static_cast<std::uint32_t>(it - td.corners.begin());
                }
        }
    });
}

void SymbolicObjective::tuple_log_probs(const TupleData& td, const SmithParams& params,
                                        std::vector<double>& logp,
                                        std::vector<std::uint8_t>& floored) const {
    std::size_t j = td.margins.size();

    // GEV transforms of every breakpoint of each margin
    std::array<std::vector<double>, 3> z, lz;
    for (std::size_t d = 0; d < j; ++d) {
        GevParams g = margin_at(td.margins[d], params.margins, layout_);
        const auto& breaks = grid_->breakpoints(td.margins[d]);
        z[d].resize(breaks.size());
        lz[d].resize(breaks.size());
        for (std::size_t u = 0; u < breaks.size(); ++u) {
            z[d][u] = gev_v(breaks[u], g);
            lz[d][u] = gev_log_v(breaks[u], g);
        }
    }

    // distribution function at each needed corner
    std::vector<double> F;
    if (j == 2) {
        PairCdf f(params, layout_, td.margins[0], td.margins[1]);
        if (td.dense) {
            F.resize(td.ncorners[0] * td.ncorners[1]);
            std::size_t pos = 0;
            for (std::size_t u = 0; u < td.ncorners[0]; ++u)
                for (std::size_t v = 0; v < td.ncorners[1]; ++v)
                    F[pos++] = f.from_transformed(z[0][u], lz[0][u], z[1][v], lz[1][v]);
        } else {
            F.resize(td.corners.size());
            for (std::size_t c = 0; c < td.corners.size(); ++c) {
                std::size_t u = td.corners[c] / td.ncorners[1];
                std::size_t v = td.corners[c] % td.ncorners[1];
                F[c] = f.from_transformed(z[0][u], lz[0][u], z[1][v], lz[1][v]);
            }
        }
    } else {
        TripleCdf f(params, layout_, {td.margins[0], td.margins[1], td.margins[2]});
        auto eval = [&](std::uint64_t corner) {
            std::size_t w = corner % td.ncorners[2];
            corner /= td.ncorners[2];
            std::size_t v = corner % td.ncorners[1];
            std::size_t u = corner / td.ncorners[1];
            return f.from_transformed({z[0][u], z[1][v], z[2][w]}, {lz[0][u], lz[1][v], lz[2][w]});
        };
        if (td.dense) {
            F.resize(td.ncorners[0] * td.ncorners[1] * td.ncorners[2]);
            for (std::size_t c = 0; c < F.size(); ++c) F[c] = eval(c);
        } else {
            F.resize(td.corners.size());
            for (std::size_t c = 0; c < td.corners.size(); ++c) F[c] = eval(td.corners[c]);
        }
    }

    // inclusion-exclusion per occupied bin
    std::size_t ncorner_per_bin = std::size_t{1} << j;
    logp.resize(td.bins.size());
    floored.assign(td.bins.size(), 0);
    double log_floor = std::log(config_.probability_floor);
    for (std::size_t i = 0; i < td.bins.size(); ++i) {
        double p = 0.0;
        for (unsigned mask = 0; mask < ncorner_per_bin; ++mask) {
            double sign = std::popcount(mask) % 2 == 0 ? 1.0 : -1.0;
            p += sign * F[td.corner_ref[i * ncorner_per_bin + mask]];
        }
        if (p < kNegativeProbTol) {
            std::ostringstream msg;
            msg << "bin probability " << p << " below tolerance in tuple (";
            for (std::size_t d = 0; d < j; ++d) msg << (d ? "," : "") << td.margins[d];
            msg << ")";
            throw numeric_error(msg.str());
        }
        p = std::clamp(p, 0.0, 1.0);
        if (p < config_.probability_floor) {
            floored[i] = 1;
            logp[i] = log_floor;
        } else {
            logp[i] = std::log(p);
        }
    }
}

LogLikValue SymbolicObjective::value(const SmithParams& params) const {
    if (!params.dependence_valid() || !margins_valid(params.margins, layout_))
        return {neg_inf, 0};

    std::vector<double> partial(tuples_.size(), 0.0);
    std::vector<long long> nfloor(tuples_.size(), 0);
    std::vector<std::string> fail(tuples_.size());
    parallel::for_index(tuples_.size(), [&](std::size_t ti) {
        try {
            const TupleData& td = tuples_[ti];
            std::vector<double> logp;
            std::vector<std::uint8_t> floored;
            tuple_log_probs(td, params, logp, floored);
            // sum_t sum_b s_{t,b} log P_b == sum_b (sum_t s_{t,b}) log P_b:
            // count addition is exact, so evaluating on the merged counts
            // makes the value identical for every T-split of the same data
            double v = 0.0;
            long long nf = 0;
            for (std::size_t i = 0; i < td.bins.size(); ++i) {
                v += static_cast<double>(td.merged_counts[i]) * logp[i];
                nf += floored[i];
            }
            partial[ti] = v;
            nfloor[ti] = nf;
        } catch (const std::exception& e) {
            fail[ti] = e.what();
        }
    });
    for (const auto& f : fail)
        if (!f.empty()) throw numeric_error(f);

    LogLikValue out;
    out.value = parallel::tree_sum(partial);
    for (long long nf : nfloor) out.floored_bins += nf;
    return out;
}

std::vector<double> SymbolicObjective::per_histogram(const SmithParams& params) const {
    if (!params.dependence_valid() || !margins_valid(params.margins, layout_))
        return std::vector<double>(T_, neg_inf);

    std::vector<std::vector<double>> per_tuple(tuples_.size());
    std::vector<std::string> fail(tuples_.size());
    parallel::for_index(tuples_.size(), [&](std::size_t ti) {
        try {
            const TupleData& td = tuples_[ti];
            std::vector<double> logp;
            std::vector<std::uint8_t> floored;
            tuple_log_probs(td, params, logp, floored);
            auto& sums = per_tuple[ti];
            sums.assign(T_, 0.0);
            for (std::size_t t = 0; t < T_; ++t)
                for (const auto& [pos, n] : td.per_t[t]) sums[t] += static_cast<double>(n) * logp[pos];
        } catch (const std::exception& e) {
            fail[ti] = e.what();
        }
    });
    for (const auto& f : fail)
        if (!f.empty()) throw numeric_error(f);

    std::vector<double> out(T_, 0.0);
    for (const auto& sums : per_tuple)
        for (std::size_t t = 0; t < T_; ++t) out[t] += sums[t];
    return out;
}

LogLikValue symbolic_composite_loglik(const HistogramSeries& series, const SmithParams& params,
                                      const SiteLayout& layout, const CompositeConfig& config) {
    return SymbolicObjective(series, layout, config).value(params);
}

ClassicObjective::ClassicObjective(Matrix data, SiteLayout layout, CompositeConfig config)
    : data_(std::move(data)), layout_(std::move(layout)), config_(std::move(config)) {
    layout_.validate();
    if (layout_.size() != data_.cols) throw data_error("ClassicObjective: layout/data mismatch");
    if (data_.rows == 0) throw data_error("ClassicObjective: empty data");
    tuples_ = config_.expand(data_.cols);
}

namespace {

// log of the j-dimensional marginal density by central differencing of the
// joint distribution function over a box of half-width h per coordinate
template <typename Cdf>
double log_density_fd(const Cdf& f, std::span<const double> x, std::size_t j, std::size_t row,
                      std::span<const std::size_t> margins) {
    double h[3], corner[3];
    double volume = 1.0;
    for (std::size_t d = 0; d < j; ++d) {
        h[d] = 1e-4 * (1.0 + std::fabs(x[d]));
        volume *= 2.0 * h[d];
    }
    double mass = 0.0;
    for (unsigned mask = 0; mask < (1u << j); ++mask) {
        for (std::size_t d = 0; d < j; ++d)
            corner[d] = x[d] + (((mask >> d) & 1u) ? -h[d] : h[d]);
        double sign = std::popcount(mask) % 2 == 0 ? 1.0 : -1.0;
        if constexpr (std::is_same_v<Cdf, PairCdf>)
            mass += sign * f(corner[0], corner[1]);
        else
            mass += sign * f(corner[0], corner[1], corner[2]);
    }
    double g = mass / volume;
    if (!(g > 0.0)) {
        std::ostringstream msg;
        msg << "nonpositive density estimate at row " << row << ", margins (";
        for (std::size_t d = 0; d < j; ++d) msg << (d ? "," : "") << margins[d];
        msg << ")";
        throw numeric_error(msg.str());
    }
    return std::log(g);
}

}  // namespace

LogLikValue ClassicObjective::value(const SmithParams& params) const {
    if (!params.dependence_valid() || !margins_valid(params.margins, layout_))
        return {neg_inf, 0};

    constexpr std::size_t chunk = 4096;
    std::size_t nchunks = parallel::chunk_count(data_.rows, chunk);
    std::size_t items = tuples_.size() * nchunks;
    std::vector<double> partial(items, 0.0);
    std::vector<std::string> fail(items);
    parallel::for_index(items, [&](std::size_t item) {
        try {
            std::size_t ti = item / nchunks;
            std::size_t begin = (item % nchunks) * chunk;
            std::size_t end = std::min(data_.rows, begin + chunk);
            const auto& m = tuples_[ti];
            std::size_t j = m.size();
            double x[3];
            double sum = 0.0;
            if (j == 2) {
                PairCdf f(params, layout_, m[0], m[1]);
                for (std::size_t r = begin; r < end; ++r) {
                    x[0] = data_(r, m[0]);
                    x[1] = data_(r, m[1]);
                    sum += log_density_fd(f, std::span<const double>(x, 2), 2, r, m);
                }
            } else {
                TripleCdf f(params, layout_, {m[0], m[1], m[2]});
                for (std::size_t r = begin; r < end; ++r) {
                    x[0] = data_(r, m[0]);
                    x[1] = data_(r, m[1]);
                    x[2] = data_(r, m[2]);
                    sum += log_density_fd(f, std::span<const double>(x, 3), 3, r, m);
                }
            }
            partial[item] = sum;
        } catch (const std::exception& e) {
            fail[item] = e.what();
        }
    });
    for (const auto& f : fail)
        if (!f.empty()) throw numeric_error(f);
    return {parallel::tree_sum(partial), 0};
}

std::vector<double> ClassicObjective::per_row(const SmithParams& params) const {
    if (!params.dependence_valid() || !margins_valid(params.margins, layout_))
        return std::vector<double>(data_.rows, neg_inf);

    constexpr std::size_t chunk = 4096;
    std::size_t nchunks = parallel::chunk_count(data_.rows, chunk);
    std::vector<double> out(data_.rows, 0.0);
    std::vector<std::string> fail(nchunks);
    parallel::for_index(nchunks, [&](std::size_t c) {
        try {
            std::size_t begin = c * chunk;
            std::size_t end = std::min(data_.rows, begin + chunk);
            double x[3];
            for (const auto& m : tuples_) {
                std::size_t j = m.size();
                if (j == 2) {
                    PairCdf f(params, layout_, m[0], m[1]);
                    for (std::size_t r = begin; r < end; ++r) {
                        x[0] = data_(r, m[0]);
                        x[1] = data_(r, m[1]);
                        out[r] += log_density_fd(f, std::span<const double>(x, 2), 2, r, m);
                    }
                } else {
                    TripleCdf f(params, layout_, {m[0], m[1], m[2]});
                    for (std::size_t r = begin; r < end; ++r) {
                        x[0] = data_(r, m[0]);
                        x[1] = data_(r, m[1]);
                        x[2] = data_(r, m[2]);
                        out[r] += log_density_fd(f, std::span<const double>(x, 3), 3, r, m);
                    }
                }
            }
        } catch (const std::exception& e) {
            fail[c] = e.what();
        }
    });
    for (const auto& f : fail)
        if (!f.empty()) throw numeric_error(f);
    return out;
}

LogLikValue classic_composite_loglik(const Matrix& data, const SmithParams& params,
                                     const SiteLayout& layout, const CompositeConfig& config) {
    return ClassicObjective(data, layout, config).value(params);
}

TermCounts count_terms(long long N, long long K, int j, std::optional<long long> B,
                       const HistogramSeries* series) {
    if (j != 2 && j != 3) throw data_error("count_terms: order must be 2 or 3");
    if (N < 0 || K < static_cast<long long>(j)) throw data_error("count_terms: invalid N or K");
    long long ntuples = j == 2 ? K * (K - 1) / 2 : K * (K - 1) * (K - 2) / 6;

    TermCounts out;
    out.classic = N * ntuples;
    if (B) {
        long long cells = 1;
        for (int d = 0; d < j; ++d) cells *= *B;
        out.symbolic_max = cells * ntuples;
    }
    if (series) {
        const BinGrid& grid = *series->grid;
        auto tuple_list = all_index_tuples(grid.dims(), j);
        long long actual = 0;
        std::unordered_set<std::uint64_t> seen;
        for (const auto& m : tuple_list) {
            std::vector<std::size_t> shape(m.size());
            for (std::size_t d = 0; d < m.size(); ++d) shape[d] = grid.bins(m[d]);
            for (const auto& hist : series->histograms) {
                seen.clear();
                for (const auto& [bin, n] : hist.counts) {
                    std::uint64_t flat = 0;
                    for (std::size_t d = 0; d < m.size(); ++d)
                        flat = flat * shape[d] + (bin[m[d]] - 1);
                    seen.insert(flat);
                }
                actual += static_cast<long long>(seen.size());
            }
        }
        out.symbolic_actual = actual;
    }
    return out;
}

}  // namespace histcl
