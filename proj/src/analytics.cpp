#include "ecolens/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ecolens::analytics {

namespace {

struct Ols {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

Ols ols(const std::vector<XY>& pts) {
    const double n = static_cast<double>(pts.size());
    double sx = 0.0, sy = 0.0;
    for (const XY& p : pts) {
        sx += p.x;
        sy += p.y;
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const XY& p : pts) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    Ols out;
    if (sxx > 0.0) out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double sst = 0.0, ssr = 0.0;
    for (const XY& p : pts) {
        const double e = p.y - (out.intercept + out.slope * p.x);
        ssr += e * e;
        sst += (p.y - my) * (p.y - my);
    }
    // A flat series has no variance to explain; a perfect flat fit counts
    // as fully explained rather than 0/0.
    constexpr double eps = 1e-12;
    if (sst < eps) {
        out.r_squared = ssr < eps ? 1.0 : 0.0;
    } else {
        out.r_squared = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
    }
    return out;
}

void fill_domain(GrowthFit& fit, const std::vector<XY>& pts) {
    double lo = pts.front().x, hi = pts.front().x;
    for (const XY& p : pts) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
    }
    fit.n_min = lo;
    fit.n_max = hi;
    fit.points = pts.size();
}

} // namespace

GrowthFit fit_heaps(const std::vector<XY>& pts) {
    std::vector<XY> logged;
    logged.reserve(pts.size());
    std::vector<XY> kept;
    kept.reserve(pts.size());
    for (const XY& p : pts) {
        if (p.x < 1.0 || p.y < 1.0) continue;
        kept.push_back(p);
        logged.push_back({std::log(p.x), std::log(p.y)});
    }
    if (logged.size() < 3) {
        throw std::runtime_error("heaps fit refused: " + std::to_string(logged.size()) +
                                 " usable samples (need >= 3 with N >= 1, D >= 1)");
    }
    const Ols o = ols(logged);
    GrowthFit fit;
    fit.kind = FitKind::heaps;
    fit.exponent = o.slope;
    fit.prefactor = std::exp(o.intercept);
    fit.r_squared = o.r_squared;
    fill_domain(fit, kept);
    return fit;
}

GrowthFit fit_heaps(const std::vector<SeriesSample>& series, FitOptions opt) {
    std::vector<XY> pts;
    pts.reserve(series.size());
    for (const SeriesSample& s : series) {
        if (s.posts <= opt.trim) continue;
        pts.push_back({static_cast<double>(s.posts), static_cast<double>(s.distinct_libs)});
    }
    return fit_heaps(pts);
}

GrowthFit fit_linear(const std::vector<XY>& pts) {
    if (pts.size() < 3) {
        throw std::runtime_error("linear fit refused: " + std::to_string(pts.size()) +
                                 " samples (need >= 3)");
    }
    const Ols o = ols(pts);
    GrowthFit fit;
    fit.kind = FitKind::linear;
    fit.slope = o.slope;
    fit.intercept = o.intercept;
    fit.r_squared = o.r_squared;
    fill_domain(fit, pts);
    return fit;
}

GrowthFit fit_linear(const std::vector<SeriesSample>& series, FitOptions opt) {
    std::vector<XY> pts;
    pts.reserve(series.size());
    for (const SeriesSample& s : series) {
        if (s.posts <= opt.trim) continue;
        pts.push_back({static_cast<double>(s.posts), static_cast<double>(s.distinct_pairs)});
    }
    return fit_linear(pts);
}

double coverage_share(const std::vector<std::int64_t>& ranked_desc, int pct) {
    if (ranked_desc.empty()) throw std::invalid_argument("coverage_share: empty counts");
    if (pct < 1 || pct > 100) throw std::invalid_argument("coverage_share: pct out of range");
    std::int64_t total = 0;
    for (std::int64_t c : ranked_desc) {
        if (c < 0) throw std::invalid_argument("coverage_share: negative count");
        total += c;
    }
    if (total <= 0) throw std::invalid_argument("coverage_share: zero total");
    std::int64_t cum = 0;
    const std::int64_t n = static_cast<std::int64_t>(ranked_desc.size());
    for (std::int64_t k = 1; k <= n; ++k) {
        cum += ranked_desc[static_cast<std::size_t>(k - 1)];
        if (cum * 100 >= static_cast<std::int64_t>(pct) * total) {
            return static_cast<double>(k) / static_cast<double>(n);
        }
    }
    return 1.0; // unreachable: cum == total at k == n
}

ConcentrationTable pareto_curve(const std::string& ecosystem,
                                const novelty::CountMap& counts) {
    if (counts.empty()) throw std::invalid_argument("pareto_curve: empty counts");
    ConcentrationTable table;
    table.ecosystem = ecosystem;
    table.ranked.reserve(counts.size());
    for (const auto& [name, c] : counts) {
        (void)name;
        table.ranked.push_back(c);
    }
    std::sort(table.ranked.begin(), table.ranked.end(), std::greater<>());
    const std::int64_t total =
        std::accumulate(table.ranked.begin(), table.ranked.end(), std::int64_t{0});
    if (total <= 0) throw std::invalid_argument("pareto_curve: zero total");
    const double n = static_cast<double>(table.ranked.size());
    table.curve.reserve(table.ranked.size() + 1);
    table.curve.push_back({0.0, 0.0});
    std::int64_t cum = 0;
    for (std::size_t i = 0; i < table.ranked.size(); ++i) {
        cum += table.ranked[i];
        table.curve.push_back({static_cast<double>(i + 1) / n,
                               static_cast<double>(cum) / static_cast<double>(total)});
    }
    table.share50 = coverage_share(table.ranked, 50);
    table.share80 = coverage_share(table.ranked, 80);
    table.share90 = coverage_share(table.ranked, 90);
    return table;
}

EcosystemReport summarize_ecosystem(const std::string& ecosystem,
                                    const std::vector<ImportEvent>& events,
                                    const std::vector<SeriesSample>& series,
                                    const GrowthFit& heaps,
                                    const GrowthFit& linear,
                                    const ConcentrationTable& conc) {
    if (events.empty()) {
        throw std::invalid_argument("summarize_ecosystem: no events for " + ecosystem);
    }
    EcosystemReport row;
    row.ecosystem = ecosystem;
    const novelty::CountMap counts = novelty::count_frequencies(events);
    row.libraries = static_cast<std::int64_t>(counts.size());
    for (const auto& [name, c] : counts) {
        (void)name;
        row.imports += c;
    }
    if (!series.empty()) {
        row.novel_libs = series.back().distinct_libs;
        row.novel_pairs = series.back().distinct_pairs;
    }
    row.share50 = conc.share50;
    row.share80 = conc.share80;
    row.share90 = conc.share90;
    row.heaps_beta = heaps.exponent;
    row.heaps_r2 = heaps.r_squared;
    row.pair_slope = linear.slope;
    row.pair_r2 = linear.r_squared;
    return row;
}

} // namespace ecolens::analytics
