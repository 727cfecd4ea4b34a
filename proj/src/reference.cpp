#include "ecolens/reference.hpp"

#include <utility>

namespace ecolens::ref {

namespace {

// keeps only eligible libs, preserving order
std::vector<std::string> filtered(const ImportEvent& ev, const std::set<std::string>& eligible) {
    std::vector<std::string> out;
    for (const auto& lib : ev.libs) {
        if (eligible.count(lib)) out.push_back(lib);
    }
    return out;
}

} // namespace

std::map<std::string, std::int64_t> count_frequencies(const std::vector<ImportEvent>& events) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& ev : events) {
        for (const auto& lib : ev.libs) ++counts[lib];
    }
    return counts;
}

std::set<std::string> eligibility(const std::map<std::string, std::int64_t>& counts,
                                  int threshold) {
    std::set<std::string> out;
    for (const auto& [lib, n] : counts) {
        if (n >= threshold) out.insert(lib);
    }
    return out;
}

std::vector<NoveltyRecord> simple_novelties(const std::vector<ImportEvent>& events,
                                            const std::set<std::string>& eligible) {
    std::vector<NoveltyRecord> out;
    std::set<std::string> seen;
    for (const auto& ev : events) {
        for (const auto& lib : filtered(ev, eligible)) {
            if (seen.count(lib)) continue;
            seen.insert(lib);
            out.push_back({ev.post_id, ev.ts_ms, ev.user_id, NoveltyKind::simple, lib, {}});
        }
    }
    return out;
}

std::vector<NoveltyRecord> pair_novelties(const std::vector<ImportEvent>& events,
                                          const std::set<std::string>& eligible) {
    std::vector<NoveltyRecord> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& ev : events) {
        auto libs = filtered(ev, eligible);
        for (std::size_t i = 0; i < libs.size(); ++i) {
            for (std::size_t j = i + 1; j < libs.size(); ++j) {
                auto key = std::make_pair(libs[i], libs[j]);
                if (seen.count(key)) continue;
                seen.insert(key);
                out.push_back({ev.post_id, ev.ts_ms, ev.user_id, NoveltyKind::pair, libs[i],
                               libs[j]});
            }
        }
    }
    return out;
}

std::vector<SeriesSample> series(const std::vector<ImportEvent>& events,
                                 const std::set<std::string>& eligible) {
    std::vector<SeriesSample> out;
    std::set<std::string> seen;
    std::set<std::pair<std::string, std::string>> seen_pairs;
    std::int64_t n = 0;
    for (const auto& ev : events) {
        ++n;
        auto libs = filtered(ev, eligible);
        for (const auto& lib : libs) seen.insert(lib);
        for (std::size_t i = 0; i < libs.size(); ++i) {
            for (std::size_t j = i + 1; j < libs.size(); ++j) {
                seen_pairs.insert({libs[i], libs[j]});
            }
        }
        out.push_back({n, (std::int64_t)seen.size(), (std::int64_t)seen_pairs.size()});
    }
    return out;
}

std::vector<PostFlags> flags(const std::vector<ImportEvent>& events,
                             const std::set<std::string>& eligible) {
    std::vector<PostFlags> out;
    std::set<std::string> seen;
    std::set<std::pair<std::string, std::string>> seen_pairs;
    for (const auto& ev : events) {
        PostFlags pf{ev.post_id, ev.ts_ms, ev.user_id, false, false};
        auto libs = filtered(ev, eligible);
        for (const auto& lib : libs) {
            if (!seen.count(lib)) {
                seen.insert(lib);
                pf.has_simple = true;
            }
        }
        for (std::size_t i = 0; i < libs.size(); ++i) {
            for (std::size_t j = i + 1; j < libs.size(); ++j) {
                if (seen_pairs.insert({libs[i], libs[j]}).second) pf.has_pair = true;
            }
        }
        out.push_back(pf);
    }
    return out;
}

} // namespace ecolens::ref
