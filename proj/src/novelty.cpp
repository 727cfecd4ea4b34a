#include "ecolens/novelty.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "ecolens/pair_set.hpp"

namespace ecolens::novelty {

namespace {

void check_order(const ImportEvent& ev, std::int64_t prev_ts, std::int64_t prev_id,
                 bool have_prev) {
    if (!have_prev) return;
    if (ev.ts_ms < prev_ts || (ev.ts_ms == prev_ts && ev.post_id < prev_id))
        throw std::runtime_error("event stream out of order at post " +
                                 std::to_string(ev.post_id));
}

} // namespace

CountMap count_frequencies(const std::vector<ImportEvent>& events) {
    CountMap counts;
    for (const auto& ev : events) {
        for (const auto& lib : ev.libs) ++counts[lib];
    }
    return counts;
}

EligibilitySet build_eligibility(const CountMap& counts, int threshold) {
    if (threshold < 1) throw std::invalid_argument("eligibility threshold must be >= 1");
    EligibilitySet out;
    for (const auto& [lib, n] : counts) {
        if (n >= threshold) out.insert(lib);
    }
    return out;
}

int effective_threshold(const EngineConfig& cfg) {
    if (cfg.threshold < 1) throw std::invalid_argument("eligibility threshold must be >= 1");
    return cfg.semantics == ThresholdSemantics::subsequent ? cfg.threshold + 1 : cfg.threshold;
}

DetectOutput detect_novelties(const std::vector<ImportEvent>& events,
                              const EligibilitySet& eligible) {
    DetectOutput out;
    std::unordered_set<std::string> seen;
    std::int64_t prev_ts = 0, prev_id = 0, n = 0;
    for (const auto& ev : events) {
        check_order(ev, prev_ts, prev_id, n > 0);
        prev_ts = ev.ts_ms;
        prev_id = ev.post_id;
        ++n;
        for (const auto& lib : ev.libs) {
            if (!eligible.count(lib) || seen.count(lib)) continue;
            seen.insert(lib);
            out.records.push_back(
                {ev.post_id, ev.ts_ms, ev.user_id, NoveltyKind::simple, lib, {}});
        }
        out.series.push_back({n, (std::int64_t)seen.size(), 0});
    }
    return out;
}

DetectOutput detect_pair_novelties(const std::vector<ImportEvent>& events,
                                   const EligibilitySet& eligible) {
    DetectOutput out;
    std::unordered_map<std::string, std::uint32_t> ids;
    PairSeenSet pairs;
    std::int64_t prev_ts = 0, prev_id = 0, n = 0;
    std::vector<std::pair<const std::string*, std::uint32_t>> ev_libs;
    for (const auto& ev : events) {
        check_order(ev, prev_ts, prev_id, n > 0);
        prev_ts = ev.ts_ms;
        prev_id = ev.post_id;
        ++n;
        ev_libs.clear();
        for (const auto& lib : ev.libs) {
            if (!eligible.count(lib)) continue;
            auto [it, _] = ids.try_emplace(lib, (std::uint32_t)ids.size());
            ev_libs.emplace_back(&it->first, it->second);
        }
        // libs arrive sorted, so (i, j) pairs come out lexicographic
        for (std::size_t i = 0; i < ev_libs.size(); ++i) {
            for (std::size_t j = i + 1; j < ev_libs.size(); ++j) {
                if (!pairs.insert(ev_libs[i].second, ev_libs[j].second)) continue;
                out.records.push_back({ev.post_id, ev.ts_ms, ev.user_id, NoveltyKind::pair,
                                       *ev_libs[i].first, *ev_libs[j].first});
            }
        }
        out.series.push_back({n, 0, (std::int64_t)pairs.size()});
    }
    return out;
}

std::vector<PostFlags> novelty_flags_per_post(const std::vector<ImportEvent>& events,
                                              const EligibilitySet& eligible) {
    std::vector<PostFlags> flags;
    flags.reserve(events.size());
    std::unordered_set<std::string> seen;
    std::unordered_map<std::string, std::uint32_t> ids;
    PairSeenSet pairs;
    std::int64_t prev_ts = 0, prev_id = 0, n = 0;
    std::vector<std::uint32_t> ev_ids;
    for (const auto& ev : events) {
        check_order(ev, prev_ts, prev_id, n > 0);
        prev_ts = ev.ts_ms;
        prev_id = ev.post_id;
        ++n;
        PostFlags pf{ev.post_id, ev.ts_ms, ev.user_id, false, false};
        ev_ids.clear();
        for (const auto& lib : ev.libs) {
            if (!eligible.count(lib)) continue;
            auto [it, _] = ids.try_emplace(lib, (std::uint32_t)ids.size());
            ev_ids.push_back(it->second);
            if (!seen.count(lib)) {
                seen.insert(lib);
                pf.has_simple = true;
            }
        }
        for (std::size_t i = 0; i < ev_ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ev_ids.size(); ++j) {
                if (pairs.insert(ev_ids[i], ev_ids[j])) pf.has_pair = true;
            }
        }
        flags.push_back(pf);
    }
    return flags;
}

EcosystemResult analyze_ecosystem(const std::string& ecosystem,
                                  const std::vector<ImportEvent>& events,
                                  const EngineConfig& cfg) {
    EcosystemResult res;
    res.ecosystem = ecosystem;

    auto counts = count_frequencies(events);
    auto eligible = build_eligibility(counts, effective_threshold(cfg));
    res.eligible_libs = (std::int64_t)eligible.size();

    std::unordered_set<std::string> seen;
    std::unordered_map<std::string, std::uint32_t> ids;
    PairSeenSet pairs;
    std::int64_t prev_ts = 0, prev_id = 0, n = 0;
    std::vector<std::pair<const std::string*, std::uint32_t>> ev_libs;

    for (const auto& ev : events) {
        check_order(ev, prev_ts, prev_id, n > 0);
        prev_ts = ev.ts_ms;
        prev_id = ev.post_id;
        ++n;

        PostFlags pf{ev.post_id, ev.ts_ms, ev.user_id, false, false};
        ev_libs.clear();
        for (const auto& lib : ev.libs) {
            if (!eligible.count(lib)) continue;
            auto [it, _] = ids.try_emplace(lib, (std::uint32_t)ids.size());
            ev_libs.emplace_back(&it->first, it->second);
            if (seen.count(lib)) continue;
            seen.insert(lib);
            pf.has_simple = true;
            res.novelties.push_back(
                {ev.post_id, ev.ts_ms, ev.user_id, NoveltyKind::simple, lib, {}});
        }
        for (std::size_t i = 0; i < ev_libs.size(); ++i) {
            for (std::size_t j = i + 1; j < ev_libs.size(); ++j) {
                if (!pairs.insert(ev_libs[i].second, ev_libs[j].second)) continue;
                pf.has_pair = true;
                res.novelties.push_back({ev.post_id, ev.ts_ms, ev.user_id, NoveltyKind::pair,
                                         *ev_libs[i].first, *ev_libs[j].first});
            }
        }
        res.series.push_back({n, (std::int64_t)seen.size(), (std::int64_t)pairs.size()});
        res.flags.push_back(pf);
    }
    res.events = n;
    return res;
}

std::vector<EcosystemResult> analyze_all(const std::vector<ImportEvent>& events,
                                         const EngineConfig& cfg) {
    std::map<std::string, std::vector<ImportEvent>> grouped;
    for (const auto& ev : events) grouped[ev.lang].push_back(ev);

    std::vector<std::string> ecos;
    std::vector<const std::vector<ImportEvent>*> slices;
    for (auto& [eco, evs] : grouped) {
        ecos.push_back(eco);
        slices.push_back(&evs);
    }

    std::vector<EcosystemResult> results(ecos.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long i = 0; i < (long long)ecos.size(); ++i) {
        results[i] = analyze_ecosystem(ecos[i], *slices[i], cfg);
    }
    return results;
}

} // namespace ecolens::novelty
