// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here, not configurable.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>
#include <unistd.h>

#include "ecolens/analytics.hpp"
#include "ecolens/geo.hpp"
#include "ecolens/grammar.hpp"
#include "ecolens/ingest.hpp"
#include "ecolens/io.hpp"
#include "ecolens/novelty.hpp"
#include "ecolens/pipeline.hpp"
#include "ecolens/reference.hpp"
#include "ecolens/synth.hpp"
#include "ecolens/user_analysis.hpp"
#include "json.hpp"

using namespace ecolens;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() /
                 ("ecolens_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(bool(in), "missing artifact: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ImportEvent ev(std::int64_t post_id, std::int64_t ts_ms, std::vector<std::string> libs,
               std::int64_t user = -1, std::string lang = "python") {
    ImportEvent e;
    e.lang = std::move(lang);
    e.post_id = post_id;
    e.ts_ms = ts_ms;
    if (user >= 0) e.user_id = user;
    std::sort(libs.begin(), libs.end());
    e.libs = std::move(libs);
    return e;
}

pipeline::Config toy_pipeline_config(const fs::path& out) {
    pipeline::Config cfg;
    cfg.posts_xml = std::string(ECOLENS_FIXTURES) + "/toy_posts.xml";
    cfg.out_dir = out.string();
    cfg.threshold = 1;
    cfg.fit_trim = 0;
    pipeline::set_ecosystems(cfg, {"python"});
    return cfg;
}

std::int64_t peak_rss_kb() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::istringstream ss(line.substr(6));
            std::int64_t kb = 0;
            ss >> kb;
            return kb;
        }
    }
    return -1;
}

// ---------------------------------------------------------------- criteria

// Three-post miniature: per-post simple novelties (2,1,0) and pair
// novelties (1,1,1) with thresholds disabled, driven end to end from the
// XML fixture through ingestion and grammar extraction.
void criterion_1() {
    ingest::IngestStats stats;
    auto posts = ingest::ingest_dump(std::string(ECOLENS_FIXTURES) + "/toy_posts.xml",
                                     ingest::default_alias_map(), stats);
    require(posts.size() == 3, "fixture must yield three snippet posts");

    auto grams = grammar::GrammarSet::defaults();
    std::vector<ImportEvent> events;
    for (const auto& p : posts) {
        for (auto& e : grams.scan_post(p)) events.push_back(std::move(e));
    }
    require(events.size() == 3, "three python import events expected");

    novelty::EngineConfig cfg;
    cfg.threshold = 1; // disabled
    auto res = novelty::analyze_ecosystem("python", events, cfg);

    std::map<std::int64_t, int> simple, pair;
    for (const auto& r : res.novelties) {
        (r.kind == NoveltyKind::pair ? pair : simple)[r.post_id]++;
    }
    require(simple[1] == 2 && simple[2] == 1 && simple[3] == 0,
            "simple novelty counts must be (2,1,0)");
    require(pair[1] == 1 && pair[2] == 1 && pair[3] == 1,
            "pair novelty counts must be (1,1,1)");
}

// Two-pass engine vs brute-force reference on random corpora.
void criterion_2() {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> n_posts(1, 50);
    std::uniform_int_distribution<int> n_libs(1, 4);
    std::uniform_int_distribution<int> lib_id(0, 9);
    std::uniform_int_distribution<int> dt(0, 2);

    int corpora = 0, comparisons = 0;
    for (int trial = 0; trial < 120; ++trial) {
        std::vector<ImportEvent> events;
        std::int64_t ts = 0;
        const int total = n_posts(rng);
        for (int p = 1; p <= total; ++p) {
            ts += dt(rng);
            std::set<std::string> libs;
            const int k = n_libs(rng);
            for (int i = 0; i < k; ++i) libs.insert("lib" + std::to_string(lib_id(rng)));
            events.push_back(ev(p, ts, {libs.begin(), libs.end()}, p));
        }
        ++corpora;

        for (int threshold : {1, 2, 3}) {
            auto counts = ref::count_frequencies(events);
            auto eligible = ref::eligibility(counts, threshold);
            auto want_simple = ref::simple_novelties(events, eligible);
            auto want_pairs = ref::pair_novelties(events, eligible);

            novelty::EngineConfig cfg;
            cfg.threshold = threshold;
            auto res = novelty::analyze_ecosystem("python", events, cfg);
            std::vector<NoveltyRecord> got_simple, got_pairs;
            for (const auto& r : res.novelties) {
                (r.kind == NoveltyKind::pair ? got_pairs : got_simple).push_back(r);
            }

            require(got_simple.size() == want_simple.size(),
                    "simple emission count mismatch");
            for (size_t i = 0; i < want_simple.size(); ++i) {
                require(got_simple[i].post_id == want_simple[i].post_id &&
                            got_simple[i].first == want_simple[i].first,
                        "simple emission mismatch");
            }
            require(got_pairs.size() == want_pairs.size(), "pair emission count mismatch");
            for (size_t i = 0; i < want_pairs.size(); ++i) {
                require(got_pairs[i].post_id == want_pairs[i].post_id &&
                            got_pairs[i].first == want_pairs[i].first &&
                            got_pairs[i].second == want_pairs[i].second,
                        "pair emission mismatch");
            }
            ++comparisons;
        }
    }
    require(corpora >= 100, "need at least 100 corpora");
    require(comparisons == corpora * 3, "every threshold must be exercised");
}

// Exact power laws to 1e-6; urn-generated corpora to +-0.05.
void criterion_3() {
    for (double beta : {0.3, 0.5, 0.8, 1.0}) {
        std::vector<analytics::XY> pts;
        for (int n = 1; n <= 2000; ++n) {
            pts.push_back({double(n), 2.0 * std::pow(double(n), beta)});
        }
        auto fit = analytics::fit_heaps(pts);
        require(std::fabs(fit.exponent - beta) <= 1e-6,
                "exact power-law exponent off at beta=" + std::to_string(beta));
        require(fit.r_squared >= 1.0 - 1e-9, "exact power-law r2 below 1-1e-9");
    }

    for (double beta : {0.4, 0.6, 0.8}) {
        synth::SynthConfig sc;
        sc.posts = 100000;
        sc.seed = 42;
        sc.mode = synth::SynthConfig::Mode::decaying;
        sc.p0 = 0.5;
        sc.beta = beta;
        auto events = synth::generate(sc);

        novelty::EngineConfig ec;
        ec.threshold = 1;
        auto res = novelty::analyze_ecosystem(sc.lang, events, ec);
        analytics::FitOptions fo;
        fo.trim = 100;
        auto fit = analytics::fit_heaps(res.series, fo);
        require(std::fabs(fit.exponent - beta) <= 0.05,
                "urn exponent " + std::to_string(fit.exponent) + " not within 0.05 of " +
                    std::to_string(beta));
    }
}

// Constant-rate urn: pair-series slope within 10% of the analytic rate.
void criterion_4() {
    synth::SynthConfig sc;
    sc.posts = 100000;
    sc.seed = 42;
    sc.mode = synth::SynthConfig::Mode::constant;
    sc.p0 = 0.05;
    auto events = synth::generate(sc);
    const double analytic = synth::analytic_pair_rate(sc); // 3 * 0.05

    novelty::EngineConfig ec;
    ec.threshold = 1;
    auto res = novelty::analyze_ecosystem(sc.lang, events, ec);
    analytics::FitOptions fo;
    fo.trim = 100;
    auto fit = analytics::fit_linear(res.series, fo);
    require(std::fabs(fit.slope - analytic) <= 0.10 * analytic,
            "pair slope " + std::to_string(fit.slope) + " not within 10% of " +
                std::to_string(analytic));
    require(fit.r_squared >= 0.99, "pair-series r2 below 0.99");
}

// Coverage-share arithmetic, hand-verified values, exact comparisons.
void criterion_5() {
    const std::vector<std::int64_t> skewed = {90, 5, 3, 1, 1};
    require(analytics::coverage_share(skewed, 80) == 0.2, "skewed share at 80% must be 0.2");
    require(analytics::coverage_share(skewed, 90) == 0.2, "skewed share at 90% must be 0.2");

    for (int k : {4, 7, 10}) {
        novelty::CountMap counts;
        for (int i = 0; i < k; ++i) counts["lib" + std::to_string(i)] = 6;
        auto table = analytics::pareto_curve("python", counts);
        for (const auto& pt : table.curve) {
            require(pt.import_share == pt.top_fraction,
                    "uniform curve must sit on the diagonal");
        }
        std::vector<std::int64_t> uniform(k, 6);
        for (int pct = 5; pct <= 100; pct += 5) {
            const double share = analytics::coverage_share(uniform, pct);
            require(std::fabs(share - pct / 100.0) <= 1.0 / k,
                    "uniform coverage share beyond 1/k of the diagonal");
        }
    }
}

// Pareto structural invariants over assorted corpora.
void criterion_6() {
    std::vector<novelty::CountMap> corpora;
    corpora.push_back({{"os", 2}, {"sys", 2}, {"random", 2}});
    corpora.push_back({{"a", 90}, {"b", 5}, {"c", 3}, {"d", 1}, {"e", 1}});
    corpora.push_back({{"solo", 17}});
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> n_libs(1, 40);
    std::uniform_int_distribution<std::int64_t> count(1, 500);
    for (int t = 0; t < 30; ++t) {
        novelty::CountMap m;
        const int n = n_libs(rng);
        for (int i = 0; i < n; ++i) m["lib" + std::to_string(i)] = count(rng);
        corpora.push_back(std::move(m));
    }

    for (const auto& counts : corpora) {
        auto table = analytics::pareto_curve("python", counts);
        require(table.curve.front().top_fraction == 0.0 &&
                    table.curve.front().import_share == 0.0,
                "curve must start at (0,0)");
        require(table.curve.back().top_fraction == 1.0 &&
                    table.curve.back().import_share == 1.0,
                "curve must end at (1,1)");
        // integer-space checks: shares non-decreasing because counts are
        // positive, increments concave because counts are sorted descending
        for (size_t i = 0; i < table.ranked.size(); ++i) {
            require(table.ranked[i] > 0, "ranked counts must be positive");
            if (i) {
                require(table.ranked[i] <= table.ranked[i - 1],
                        "ranked counts must be non-increasing");
            }
        }
        double prev = 0.0;
        for (const auto& pt : table.curve) {
            require(pt.import_share >= prev, "curve must be non-decreasing");
            prev = pt.import_share;
        }
        require(table.share50 <= table.share80 && table.share80 <= table.share90,
                "share(50) <= share(80) <= share(90) must hold");
    }
}

// Constructed corpus: novelty appears exactly on each user's first post.
void criterion_7() {
    const int users_n = 50;
    std::vector<ImportEvent> stream;
    // first posts: one fresh library each; second posts: repeat the same
    for (int u = 1; u <= users_n; ++u) {
        stream.push_back(ev(u, u * 1000, {"lib" + std::to_string(u)}, u));
    }
    for (int u = 1; u <= users_n; ++u) {
        stream.push_back(
            ev(users_n + u, (users_n + u) * 1000, {"lib" + std::to_string(u)}, u));
    }

    auto eligible =
        novelty::build_eligibility(novelty::count_frequencies(stream), 1);
    std::vector<io::FlagRow> rows;
    for (const auto& f : novelty::novelty_flags_per_post(stream, eligible)) {
        rows.push_back({"python", f});
    }
    auto exp = users::experience_from_events(stream);
    auto joined = users::join_flags(rows, exp, std::nullopt, nullptr);
    auto bins = users::novelty_rate_by_bin(joined);

    require(bins.size() >= 5 && bins[0].ecosystem == "pooled", "pooled block first");
    require(bins[0].posts == users_n, "bin {0} must hold every first post");
    require(bins[0].simple_rate.has_value() && *bins[0].simple_rate == 1.0,
            "bin {0} simple rate must be exactly 1.0");
    require(bins[1].posts == users_n, "bin [1,10] must hold every second post");
    require(bins[1].simple_rate.has_value() && *bins[1].simple_rate == 0.0,
            "bin [1,10] simple rate must be exactly 0.0");
    for (int b = 2; b < 5; ++b) {
        require(bins[b].posts == 0, "higher bins must be empty");
    }
}

// Geographic suppression boundary and single-country degeneracy.
void criterion_8() {
    const std::int64_t min_posts = 5;
    geo::UserCountryMap map;
    for (std::int64_t u = 1; u <= 9; ++u) map[u] = u <= 4 ? "DE" : "FR";

    std::vector<io::FlagRow> flags;
    std::int64_t post = 0;
    for (std::int64_t u = 1; u <= 4; ++u) { // DE: min_posts - 1
        ++post;
        flags.push_back({"python", {post, post * 1000, u, post == 1, false}});
    }
    for (std::int64_t u = 5; u <= 9; ++u) { // FR: exactly min_posts
        ++post;
        flags.push_back({"python", {post, post * 1000, u, false, false}});
    }

    auto res = geo::country_novelty_rates(flags, map, min_posts);
    require(res.rows.size() == 2, "exactly the global row and FR must remain");
    require(res.rows[0].country == "ALL" && res.rows[1].country == "FR",
            "country with min_posts-1 posts must be suppressed");
    require(res.suppressed == 1, "one suppressed country expected");

    // degenerate corpus: one country carries every mapped post
    geo::UserCountryMap solo{{7, "JP"}};
    std::vector<io::FlagRow> sflags;
    for (std::int64_t p = 1; p <= 8; ++p) {
        sflags.push_back({"python", {p, p * 1000, std::optional<std::int64_t>{7},
                                     p % 3 == 0, p % 4 == 0}});
    }
    auto sres = geo::country_novelty_rates(sflags, solo, 1);
    require(sres.rows.size() == 2, "ALL and the single country expected");
    require(sres.rows[0].simple_rate == sres.rows[1].simple_rate &&
                sres.rows[0].pair_rate == sres.rows[1].pair_rate,
            "single-country rate must equal the global average exactly");
}

// Import grammars: the canonical python listing plus every fixture corpus.
void criterion_9() {
    auto gs = grammar::GrammarSet::defaults();
    const std::string listing =
        "import pandas as pd\n"
        "from numpy import array\n"
        "import glob\n"
        "import requests, math\n";
    require(gs.extract_imports(listing, "python") ==
                std::set<std::string>{"glob", "math", "numpy", "pandas", "requests"},
            "python listing must extract exactly {pandas,numpy,glob,requests,math}");

    for (const auto& eco : gs.ecosystems()) {
        std::ifstream in(std::string(ECOLENS_FIXTURES) + "/grammar/" + eco + ".jsonl");
        require(bool(in), "fixture corpus missing for " + eco);
        std::string line;
        int n = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line);
            std::set<std::string> want;
            for (const auto& l : j.at("libs")) want.insert(l.get<std::string>());
            auto got = gs.extract_imports(j.at("code").get<std::string>(), eco);
            ++n;
            require(got == want, eco + " fixture snippet #" + std::to_string(n) +
                                     " extracted the wrong set");
        }
        require(n >= 20, eco + " fixture corpus has fewer than 20 snippets");
    }
}

// Byte-identical artifacts across repeat runs, in-process and via the CLI.
void criterion_10() {
    const auto out_a = fresh_dir("det_a");
    const auto out_b = fresh_dir("det_b");
    const auto out_c = fresh_dir("det_c");
    pipeline::run(toy_pipeline_config(out_a));
    pipeline::run(toy_pipeline_config(out_b));

    const auto cfg_path = out_c / "config.json";
    {
        std::ofstream f(cfg_path);
        f << pipeline::config_to_json_text(toy_pipeline_config(out_c));
    }
    const std::string cmd =
        std::string(ECOLENS_BIN) + " run --config " + cfg_path.string() + " >/dev/null 2>&1";
    require(std::system(cmd.c_str()) == 0, "cli run failed");

    int compared = 0;
    for (const auto& entry : fs::directory_iterator(out_a)) {
        const std::string name = entry.path().filename().string();
        const auto ext = entry.path().extension().string();
        if (ext != ".csv" && ext != ".svg" && ext != ".jsonl") continue;
        const std::string a = slurp(entry.path());
        require(a == slurp(out_b / name), name + " differs between identical runs");
        require(a == slurp(out_c / name), name + " differs between library and cli runs");
        ++compared;
    }
    require(compared >= 10, "expected at least ten comparable artifacts");
}

// Synthetic million-event corpus through the full pipeline under time and
// memory budgets.
void criterion_11() {
    const auto out = fresh_dir("big");

    synth::SynthConfig sc;
    sc.posts = 1000000;
    sc.seed = 7;
    sc.mode = synth::SynthConfig::Mode::constant;
    sc.p0 = 0.05;
    sc.users = 1000;
    const auto events_path = out / "input_events.jsonl";
    {
        auto events = synth::generate(sc);
        require(events.size() == 1000000, "generator must emit one event per post");
        io::write_events(events_path.string(), events);
    }

    const auto countries_path = out / "countries.csv";
    {
        std::ofstream f(countries_path);
        f << "user_id,country\n";
        const char* codes[] = {"US", "DE", "FR", "GB", "IN"};
        for (std::int64_t u = 1; u <= sc.users; ++u) {
            f << u << "," << codes[u % 5] << "\n";
        }
    }

    pipeline::Config cfg;
    cfg.events_jsonl = events_path.string();
    cfg.out_dir = out.string();
    cfg.threshold = 10;
    cfg.fit_trim = 100;
    cfg.user_countries = countries_path.string();
    cfg.min_posts_geo = 1000;
    pipeline::set_ecosystems(cfg, {sc.lang});
    pipeline::run(cfg);

    require(fs::exists(out / "novelties.csv"), "novelties.csv missing");
    require(fs::exists(out / "table1.csv"), "table1.csv missing");
    require(fs::exists(out / "user_bins.csv"), "user_bins.csv missing");
    require(fs::exists(out / "geo_rates.csv"), "geo_rates.csv missing");
    require(fs::exists(out / "manifest.json"), "manifest.json missing");

    const std::int64_t rss_kb = peak_rss_kb();
    require(rss_kb > 0, "could not read VmHWM");
    require(rss_kb < 2LL * 1024 * 1024,
            "peak rss " + std::to_string(rss_kb) + " kB exceeds 2 GB");
}

struct Criterion {
    int id;
    const char* what;
    double budget_s; // 0 = untimed
    std::function<void()> fn;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "toy corpus simple (2,1,0) and pair (1,1,1), thresholds disabled", 1.0,
         criterion_1},
        {2, "two-pass engine equals brute force on 120 random corpora", 30.0, criterion_2},
        {3, "heaps fit: exact power laws to 1e-6, urn corpora to +-0.05", 60.0, criterion_3},
        {4, "pair-series slope within 10% of the analytic urn rate", 60.0, criterion_4},
        {5, "coverage shares: skewed hand-checked, uniform on the diagonal", 0.0,
         criterion_5},
        {6, "pareto curves non-decreasing, concave, ending at (1,1)", 0.0, criterion_6},
        {7, "experience bins: first posts carry all novelty, exactly", 0.0, criterion_7},
        {8, "geography: suppression boundary and single-country degeneracy", 0.0,
         criterion_8},
        {9, "grammar: python listing and all fixture corpora at 100%", 0.0, criterion_9},
        {10, "byte-identical artifacts across repeat and cli runs", 0.0, criterion_10},
        {11, "million-event corpus within 5 minutes and 2 GB", 300.0, criterion_11},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        std::string error;
        try {
            c.fn();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        if (error.empty() && c.budget_s > 0 && s > c.budget_s) {
            error = "exceeded " + std::to_string(c.budget_s) + "s budget";
        }
        if (error.empty()) {
            std::printf("[PASS] criterion %2d: %s (%.2fs)\n", c.id, c.what, s);
        } else {
            std::printf("[FAIL] criterion %2d: %s (%.2fs) -- %s\n", c.id, c.what, s,
                        error.c_str());
            ++failed;
        }
        std::fflush(stdout);
    }
    if (failed) std::printf("%d criterion(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
