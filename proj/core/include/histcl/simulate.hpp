#pragma once

#include <array>
#include <cstdint>

#include "histcl/matrix.hpp"
#include "histcl/smith.hpp"

namespace histcl {

struct SimConfig {
    std::uint64_t seed = 0;
    std::size_t K = 2;
    std::size_t N = 1;
    std::array<double, 4> window{0.0, 40.0, 0.0, 40.0};  // x_lo, x_hi, y_lo, y_hi
    SmithParams params;
    double storm_window_expansion = 4.0;

    void validate() const;
};

/// K sites drawn uniformly over the window. Sites are drawn sequentially
/// from one stream, so the first K' sites of a K-site draw equal the
/// K'-site draw for the same seed.
SiteLayout sample_sites(const SimConfig& config);

/// N rows of the Gaussian max-stable process at the layout's sites.
/// Each row is an independent storm-process realization: Poisson storm
/// magnitudes zeta_i = |W|/E_i with E_i cumulative exponentials, centers
/// uniform on the window expanded by storm_window_expansion * sqrt of the
/// dominant storm scale, stopping once zeta_i times the peak storm density
/// cannot change any site's running maximum. Unit Frechet values are then
/// mapped through the configured margins. Rows use per-row random streams,
/// so output is reproducible for any worker count.
Matrix simulate_smith(const SiteLayout& layout, const SimConfig& config);

}  // namespace histcl
