#include "ecolens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

namespace ecolens::synth {

namespace {

constexpr std::int64_t kBaseTsMs = 1199145600000; // 2008-01-01T00:00:00Z

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string lib_name(std::uint32_t id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "lib%07u", id);
    return buf;
}

void check(const SynthConfig& cfg) {
    if (cfg.posts < 1) throw std::invalid_argument("synth: posts must be >= 1");
    if (cfg.p0 <= 0.0 || cfg.p0 > 1.0) throw std::invalid_argument("synth: p0 outside (0,1]");
    if (cfg.mode == SynthConfig::Mode::decaying && (cfg.beta <= 0.0 || cfg.beta > 1.0)) {
        throw std::invalid_argument("synth: beta outside (0,1]");
    }
    if (cfg.libs_min < 1 || cfg.libs_max < cfg.libs_min) {
        throw std::invalid_argument("synth: bad libs-per-post range");
    }
    if (cfg.users < 1) throw std::invalid_argument("synth: users must be >= 1");
    if (cfg.lang.empty()) throw std::invalid_argument("synth: empty lang");
}

double mean_k(const SynthConfig& cfg) {
    return (cfg.libs_min + cfg.libs_max) / 2.0;
}

double mean_pairs(const SynthConfig& cfg) {
    double sum = 0.0;
    for (int k = cfg.libs_min; k <= cfg.libs_max; ++k) {
        sum += static_cast<double>(k) * (k - 1) / 2.0;
    }
    return sum / (cfg.libs_max - cfg.libs_min + 1);
}

} // namespace

SynthConfig::Mode mode_from_string(const std::string& s) {
    if (s == "constant") return SynthConfig::Mode::constant;
    if (s == "decaying") return SynthConfig::Mode::decaying;
    throw std::invalid_argument("unknown synth mode: " + s);
}

std::string to_string(SynthConfig::Mode mode) {
    return mode == SynthConfig::Mode::constant ? "constant" : "decaying";
}

std::vector<ImportEvent> generate(const SynthConfig& cfg) {
    check(cfg);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::vector<std::uint32_t>> history; // lib ids per past post
    history.reserve(static_cast<std::size_t>(cfg.posts));
    std::uint32_t next_id = 0;
    std::vector<ImportEvent> events;
    events.reserve(static_cast<std::size_t>(cfg.posts));

    for (std::int64_t t = 1; t <= cfg.posts; ++t) {
        double p = cfg.p0;
        if (cfg.mode == SynthConfig::Mode::decaying) {
            p = std::min(1.0, cfg.p0 * std::pow(static_cast<double>(t), cfg.beta - 1.0));
        }
        std::vector<std::uint32_t> libs;
        if (history.empty() || unit(rng) < p) {
            const int k = cfg.libs_min == cfg.libs_max
                              ? cfg.libs_min
                              : cfg.libs_min +
                                    static_cast<int>(bounded(
                                        rng,
                                        static_cast<std::uint64_t>(cfg.libs_max - cfg.libs_min + 1)));
            libs.reserve(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) libs.push_back(next_id++);
        } else {
            libs = history[bounded(rng, history.size())];
        }
        ImportEvent ev;
        ev.lang = cfg.lang;
        ev.post_id = t;
        ev.ts_ms = kBaseTsMs + (t - 1) * 1000;
        ev.user_id = (t - 1) % cfg.users + 1;
        ev.libs.reserve(libs.size());
        for (std::uint32_t id : libs) ev.libs.push_back(lib_name(id)); // ids ascend
        history.push_back(std::move(libs));
        events.push_back(std::move(ev));
    }
    return events;
}

double analytic_heaps_exponent(const SynthConfig& cfg) {
    return cfg.mode == SynthConfig::Mode::constant ? 1.0 : cfg.beta;
}

double analytic_simple_rate(const SynthConfig& cfg) {
    if (cfg.mode != SynthConfig::Mode::constant) {
        throw std::invalid_argument("analytic simple rate defined for constant mode only");
    }
    return mean_k(cfg) * cfg.p0;
}

double analytic_pair_rate(const SynthConfig& cfg) {
    if (cfg.mode != SynthConfig::Mode::constant) {
        throw std::invalid_argument("analytic pair rate defined for constant mode only");
    }
    return mean_pairs(cfg) * cfg.p0;
}

} // namespace ecolens::synth
