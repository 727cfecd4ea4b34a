#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecolens/novelty.hpp"
#include "ecolens/types.hpp"

namespace ecolens::analytics {

enum class FitKind { heaps, linear };

// heaps: D = prefactor * N^exponent, fitted by OLS on (log N, log D).
// linear: P = slope * N + intercept, fitted on the raw samples.
struct GrowthFit {
    std::string ecosystem;
    FitKind kind = FitKind::heaps;
    double exponent = 0.0;
    double prefactor = 1.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double n_min = 0.0; // fit domain, after trimming
    double n_max = 0.0;
    std::size_t points = 0;
};

struct FitOptions {
    // Samples with N <= trim are excluded (early-series transient).
    std::int64_t trim = 0;
};

struct XY {
    double x = 0.0;
    double y = 0.0;
};

// Both fitters refuse (throw) with fewer than 3 usable points. The heaps
// fitter additionally drops points outside the log domain (x < 1 or y < 1),
// so a series prefix with D = 0 is skipped rather than fatal.
GrowthFit fit_heaps(const std::vector<XY>& pts);
GrowthFit fit_heaps(const std::vector<SeriesSample>& series, FitOptions opt = {});

GrowthFit fit_linear(const std::vector<XY>& pts);
GrowthFit fit_linear(const std::vector<SeriesSample>& series, FitOptions opt = {});

struct ParetoPoint {
    double top_fraction = 0.0; // top share of libraries, by rank
    double import_share = 0.0; // cumulative share of imports they carry
};

struct ConcentrationTable {
    std::string ecosystem;
    std::vector<std::int64_t> ranked; // per-library post counts, descending
    std::vector<ParetoPoint> curve;   // (0,0) plus one point per library
    double share50 = 0.0;             // top-fraction of libraries covering 50%
    double share80 = 0.0;
    double share90 = 0.0;
};

// Smallest top-fraction of libraries whose counts reach pct% of the total.
// Integer arithmetic throughout: cum * 100 >= pct * total, no float ties.
double coverage_share(const std::vector<std::int64_t>& ranked_desc, int pct);

ConcentrationTable pareto_curve(const std::string& ecosystem,
                                const novelty::CountMap& counts);

// One row of the per-ecosystem summary table.
struct EcosystemReport {
    std::string ecosystem;
    std::int64_t libraries = 0;   // distinct extracted names
    std::int64_t imports = 0;     // sum over posts of per-post-distinct libs
    std::int64_t novel_libs = 0;  // eligible libraries seen (final D)
    std::int64_t novel_pairs = 0; // eligible pairs seen (final P)
    double share50 = 0.0;
    double share80 = 0.0;
    double share90 = 0.0;
    double heaps_beta = 0.0;
    double heaps_r2 = 0.0;
    double pair_slope = 0.0;
    double pair_r2 = 0.0;
};

EcosystemReport summarize_ecosystem(const std::string& ecosystem,
                                    const std::vector<ImportEvent>& events,
                                    const std::vector<SeriesSample>& series,
                                    const GrowthFit& heaps,
                                    const GrowthFit& linear,
                                    const ConcentrationTable& conc);

} // namespace ecolens::analytics
