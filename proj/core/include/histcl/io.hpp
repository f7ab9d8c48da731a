#pragma once

#include <string>
#include <vector>

#include "histcl/histogram.hpp"
#include "histcl/inference.hpp"
#include "histcl/matrix.hpp"
#include "histcl/sites.hpp"

namespace histcl::io {

/// Micro-data CSV: header row of site ids, one row per time index,
/// missing values forbidden.
struct MicroData {
    std::vector<std::string> site_ids;
    Matrix data;
};

MicroData read_micro_csv(const std::string& path);
void write_micro_csv(const std::string& path, const std::vector<std::string>& site_ids,
                     const Matrix& data);

/// Sites CSV: header "id,x,y".
SiteLayout read_sites_csv(const std::string& path);
void write_sites_csv(const std::string& path, const SiteLayout& layout);

/// Histogram interchange JSON; counts round-trip losslessly.
struct HistogramFile {
    HistogramSeries series;
    std::vector<std::string> site_ids;  // may be empty
    std::string bin_rule;               // provenance of the breakpoints
};

HistogramFile read_histogram_json(const std::string& path);
void write_histogram_json(const std::string& path, const HistogramSeries& series,
                          const std::vector<std::string>& site_ids = {},
                          const std::string& bin_rule = {});

struct FitFile {
    FitResult result;
    int order = 2;
    std::string mode;                   // "symbolic" or "classic"
    std::vector<std::size_t> grid_bins;  // bins per margin of the fitted histogram
    std::string bin_rule;
};

void write_fit_json(const std::string& path, const FitFile& fit);
FitFile read_fit_json(const std::string& path);

/// FNV-1a 64-bit digest of a file, for manifest change detection.
std::string fnv1a_digest(const std::string& path);

/// Writes via a temporary file in the same directory plus rename, so readers
/// never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace histcl::io
