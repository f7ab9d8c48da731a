#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "histcl/error.hpp"

namespace histcl {

struct Site {
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

/// Planar site coordinates. At least two sites, unique ids, finite coordinates.
struct SiteLayout {
    std::vector<Site> sites;

    std::size_t size() const { return sites.size(); }
    const Site& operator[](std::size_t k) const { return sites[k]; }

    void validate() const;
};

}  // namespace histcl
