#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "ecolens/analytics.hpp"
#include "ecolens/novelty.hpp"

using namespace ecolens;
using analytics::XY;

namespace {

std::vector<XY> power_law(double a, double beta, int n) {
    std::vector<XY> pts;
    for (int i = 1; i <= n; ++i) {
        double x = static_cast<double>(i);
        pts.push_back({x, a * std::pow(x, beta)});
    }
    return pts;
}

} // namespace

TEST_CASE("heaps fit recovers exact power laws to machine precision") {
    for (double beta : {0.3, 0.5, 0.8, 1.0}) {
        auto fit = analytics::fit_heaps(power_law(2.0, beta, 500));
        CHECK(fit.exponent == doctest::Approx(beta).epsilon(1e-9));
        CHECK(fit.prefactor == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(fit.r_squared >= 1.0 - 1e-9);
        CHECK(fit.points == 500);
    }
}

TEST_CASE("heaps fit of a constant has zero exponent and r2 one") {
    std::vector<XY> pts;
    for (int i = 1; i <= 100; ++i) pts.push_back({double(i), 5.0});
    auto fit = analytics::fit_heaps(pts);
    CHECK(fit.exponent == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.prefactor == doctest::Approx(5.0).epsilon(1e-9));
    // a constant is fit perfectly; zero variance explained is not an error
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("heaps fit skips points outside the log domain") {
    // leading D = 0 samples are dropped, not fatal and not distorting
    std::vector<XY> pts = {{1, 0}, {2, 0}};
    auto tail = power_law(1.5, 0.5, 300);
    pts.insert(pts.end(), tail.begin() + 2, tail.end());
    auto fit = analytics::fit_heaps(pts);
    CHECK(fit.points == 298);
    CHECK(fit.exponent == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("linear fit recovers slope and intercept exactly") {
    auto fit = analytics::fit_linear(std::vector<XY>{{1, 1}, {2, 2}, {3, 3}});
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.n_min == 1);
    CHECK(fit.n_max == 3);

    auto affine = analytics::fit_linear(std::vector<XY>{{1, 5}, {2, 7}, {3, 9}, {4, 11}});
    CHECK(affine.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(affine.intercept == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("fits refuse without enough usable points") {
    CHECK_THROWS_AS(analytics::fit_linear(std::vector<XY>{{1, 1}, {2, 2}}), std::runtime_error);
    CHECK_THROWS_AS(analytics::fit_heaps(std::vector<XY>{}), std::runtime_error);
    // three points, but two fall outside the log domain
    CHECK_THROWS_AS(analytics::fit_heaps(std::vector<XY>{{1, 0}, {2, 0}, {3, 3}}),
                    std::runtime_error);
}

TEST_CASE("series overloads honor the trim option") {
    std::vector<SeriesSample> series;
    for (int n = 1; n <= 400; ++n) {
        SeriesSample s;
        s.posts = n;
        // transient junk early, clean power law later
        s.distinct_libs = n <= 100 ? 7 : static_cast<std::int64_t>(3.0 * std::pow(n, 0.5));
        s.distinct_pairs = 2 * n;
        series.push_back(s);
    }
    analytics::FitOptions opt;
    opt.trim = 100;
    auto heaps = analytics::fit_heaps(series, opt);
    CHECK(heaps.points == 300);
    CHECK(heaps.n_min == 101);
    CHECK(heaps.n_max == 400);
    // rounding to integer D keeps the exponent close, not exact
    CHECK(heaps.exponent == doctest::Approx(0.5).epsilon(0.02));

    auto linear = analytics::fit_linear(series, opt);
    CHECK(linear.slope == doctest::Approx(2.0).epsilon(1e-9));

    analytics::FitOptions all;
    auto untrimmed = analytics::fit_heaps(series, all);
    CHECK(untrimmed.points == 400);
}

TEST_CASE("coverage share arithmetic is integer-exact") {
    const std::vector<std::int64_t> skewed = {90, 5, 3, 1, 1};
    CHECK(analytics::coverage_share(skewed, 50) == doctest::Approx(0.2));
    CHECK(analytics::coverage_share(skewed, 80) == doctest::Approx(0.2));
    CHECK(analytics::coverage_share(skewed, 90) == doctest::Approx(0.2));
    CHECK(analytics::coverage_share(skewed, 95) == doctest::Approx(0.4));
    CHECK(analytics::coverage_share(skewed, 100) == doctest::Approx(1.0));

    // uniform counts: half the total needs exactly ceil(k/2) libraries
    for (int k : {1, 2, 5, 10, 33}) {
        std::vector<std::int64_t> uniform(k, 4);
        const double want = std::ceil(k / 2.0) / k;
        CHECK(analytics::coverage_share(uniform, 50) == doctest::Approx(want));
    }

    // scale invariance: multiplying every count leaves shares unchanged
    std::vector<std::int64_t> scaled = skewed;
    for (auto& c : scaled) c *= 7;
    for (int pct : {50, 80, 90}) {
        CHECK(analytics::coverage_share(scaled, pct) ==
              doctest::Approx(analytics::coverage_share(skewed, pct)));
    }
}

TEST_CASE("pareto curve shape invariants") {
    novelty::CountMap counts{{"a", 90}, {"b", 5}, {"c", 3}, {"d", 1}, {"e", 1}};
    auto table = analytics::pareto_curve("python", counts);
    CHECK(table.ecosystem == "python");
    CHECK(table.ranked == std::vector<std::int64_t>{90, 5, 3, 1, 1});
    REQUIRE(table.curve.size() == 6); // (0,0) plus one point per library

    CHECK(table.curve.front().top_fraction == doctest::Approx(0.0));
    CHECK(table.curve.front().import_share == doctest::Approx(0.0));
    CHECK(table.curve.back().top_fraction == doctest::Approx(1.0));
    CHECK(table.curve.back().import_share == doctest::Approx(1.0));

    // non-decreasing with concave (non-increasing) increments
    double prev_share = 0.0, prev_inc = 1e300;
    for (size_t i = 1; i < table.curve.size(); ++i) {
        const double inc = table.curve[i].import_share - prev_share;
        CHECK(inc >= -1e-15);
        CHECK(inc <= prev_inc + 1e-15);
        prev_share = table.curve[i].import_share;
        prev_inc = inc;
    }
    CHECK(table.share50 == doctest::Approx(0.2));
    CHECK(table.share80 == doctest::Approx(0.2));
    CHECK(table.share90 == doctest::Approx(0.2));
    CHECK(table.share50 <= table.share80);
    CHECK(table.share80 <= table.share90);

    CHECK_THROWS_AS(analytics::pareto_curve("python", novelty::CountMap{}),
                    std::invalid_argument);
}

TEST_CASE("uniform counts put the pareto curve on the diagonal") {
    novelty::CountMap counts;
    const int k = 8;
    for (int i = 0; i < k; ++i) counts["lib" + std::to_string(i)] = 12;
    auto table = analytics::pareto_curve("python", counts);
    for (const auto& pt : table.curve) {
        CHECK(pt.import_share == doctest::Approx(pt.top_fraction).epsilon(1e-12));
    }
}

TEST_CASE("ecosystem summary on the three-post corpus") {
    std::vector<ImportEvent> events(3);
    events[0] = {"python", 1, 1000, std::nullopt, {"os", "sys"}};
    events[1] = {"python", 2, 2000, std::nullopt, {"random", "sys"}};
    events[2] = {"python", 3, 3000, std::nullopt, {"os", "random"}};

    novelty::EngineConfig cfg;
    cfg.threshold = 1;
    auto res = novelty::analyze_ecosystem("python", events, cfg);
    auto counts = novelty::count_frequencies(events);
    auto conc = analytics::pareto_curve("python", counts);
    auto heaps = analytics::fit_heaps(res.series);
    auto linear = analytics::fit_linear(res.series);
    auto report = analytics::summarize_ecosystem("python", events, res.series,
                                                 heaps, linear, conc);

    CHECK(report.libraries == 3);
    CHECK(report.imports == 6);
    CHECK(report.novel_libs == 3);
    CHECK(report.novel_pairs == 3);
    // three equal counts: 50% needs two libraries, more needs all three
    CHECK(report.share50 == doctest::Approx(2.0 / 3.0));
    CHECK(report.share80 == doctest::Approx(1.0));
    CHECK(report.share90 == doctest::Approx(1.0));
    // the pair series is exactly the diagonal
    CHECK(report.pair_slope == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.pair_r2 == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(analytics::summarize_ecosystem("python", {}, res.series, heaps,
                                                   linear, conc),
                    std::invalid_argument);
}
