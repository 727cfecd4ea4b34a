#include "ecolens/user_analysis.hpp"

#include <algorithm>
#include <stdexcept>

#include "ecolens/text.hpp"

namespace ecolens::users {

const std::array<ExperienceBin, 5>& bins() {
    static const std::array<ExperienceBin, 5> kBins = {{
        {"0", 0, 0},
        {"1-10", 1, 10},
        {"11-100", 11, 100},
        {"101-1000", 101, 1000},
        {">1000", 1001, -1},
    }};
    return kBins;
}

int bin_of(std::int64_t experience) {
    if (experience < 0) throw std::invalid_argument("bin_of: negative experience");
    if (experience == 0) return 0;
    if (experience <= 10) return 1;
    if (experience <= 100) return 2;
    if (experience <= 1000) return 3;
    return 4;
}

ExperienceSource experience_source_from_string(const std::string& s) {
    if (s == "events") return ExperienceSource::events;
    if (s == "snippet_posts") return ExperienceSource::snippet_posts;
    throw std::invalid_argument("unknown experience source: " + s);
}

std::string to_string(ExperienceSource s) {
    return s == ExperienceSource::events ? "events" : "snippet_posts";
}

ExperienceTable experience_from_events(const std::vector<ImportEvent>& ordered) {
    ExperienceTable table;
    std::map<std::pair<std::string, std::int64_t>, std::int64_t> counters;
    for (const ImportEvent& ev : ordered) {
        if (!ev.user_id) {
            ++table.anonymous;
            continue;
        }
        std::int64_t& n = counters[{ev.lang, *ev.user_id}];
        table.by_post[{ev.lang, ev.post_id}] = n;
        ++n;
    }
    return table;
}

ExperienceTable experience_from_posts(const std::vector<SnippetPost>& ordered) {
    ExperienceTable table;
    std::map<std::pair<std::string, std::int64_t>, std::int64_t> counters;
    for (const SnippetPost& post : ordered) {
        if (!post.user_id) {
            ++table.anonymous;
            continue;
        }
        for (const std::string& lang : post.langs) {
            std::int64_t& n = counters[{lang, *post.user_id}];
            table.by_post[{lang, post.post_id}] = n;
            ++n;
        }
    }
    return table;
}

std::int64_t experience_at_post(const std::vector<ImportEvent>& ordered,
                                std::int64_t user_id, const std::string& lang,
                                std::int64_t ts_ms, std::int64_t post_id) {
    std::int64_t n = 0;
    for (const ImportEvent& ev : ordered) {
        if (ev.lang != lang || !ev.user_id || *ev.user_id != user_id) continue;
        if (ev.ts_ms < ts_ms || (ev.ts_ms == ts_ms && ev.post_id < post_id)) ++n;
    }
    return n;
}

std::vector<JoinedRow> join_flags(const std::vector<io::FlagRow>& flags,
                                  const ExperienceTable& exp,
                                  std::optional<int> year, JoinStats* stats) {
    std::vector<JoinedRow> rows;
    rows.reserve(flags.size());
    JoinStats local;
    for (const io::FlagRow& fr : flags) {
        if (!fr.flags.user_id) {
            ++local.anonymous;
            continue;
        }
        if (year && text::year_of_ms(fr.flags.ts_ms) != *year) {
            ++local.outside_year;
            continue;
        }
        auto it = exp.by_post.find({fr.lang, fr.flags.post_id});
        if (it == exp.by_post.end()) {
            throw std::runtime_error("no experience entry for " + fr.lang + " post " +
                                     std::to_string(fr.flags.post_id));
        }
        rows.push_back({fr.lang, fr.flags.post_id, fr.flags.ts_ms, it->second,
                        fr.flags.has_simple, fr.flags.has_pair});
        ++local.analyzed;
    }
    if (stats) *stats = local;
    return rows;
}

namespace {

struct BinCounter {
    std::int64_t posts = 0;
    std::int64_t simple = 0;
    std::int64_t pair = 0;
};

void emit_block(const std::string& ecosystem, const std::array<BinCounter, 5>& counters,
                std::vector<BinRateRow>& out) {
    for (int b = 0; b < 5; ++b) {
        const BinCounter& c = counters[static_cast<std::size_t>(b)];
        BinRateRow row;
        row.ecosystem = ecosystem;
        row.bin = b;
        row.label = bins()[static_cast<std::size_t>(b)].label;
        row.posts = c.posts;
        if (c.posts > 0) {
            row.simple_rate = static_cast<double>(c.simple) / static_cast<double>(c.posts);
            row.pair_rate = static_cast<double>(c.pair) / static_cast<double>(c.posts);
        }
        out.push_back(std::move(row));
    }
}

} // namespace

std::vector<BinRateRow> novelty_rate_by_bin(const std::vector<JoinedRow>& rows) {
    std::array<BinCounter, 5> pooled{};
    std::map<std::string, std::array<BinCounter, 5>> per_lang;
    for (const JoinedRow& r : rows) {
        const auto b = static_cast<std::size_t>(bin_of(r.experience));
        for (BinCounter* c : {&pooled[b], &per_lang[r.lang][b]}) {
            ++c->posts;
            if (r.has_simple) ++c->simple;
            if (r.has_pair) ++c->pair;
        }
    }
    std::vector<BinRateRow> out;
    out.reserve(5 * (per_lang.size() + 1));
    emit_block("pooled", pooled, out);
    for (const auto& [lang, counters] : per_lang) emit_block(lang, counters, out);
    return out;
}

std::string variant_name(const VariantSpec& spec) {
    std::string name = "t" + std::to_string(spec.threshold);
    if (spec.semantics == novelty::ThresholdSemantics::subsequent) name += "s";
    if (spec.year) name += "_y" + std::to_string(*spec.year);
    return name;
}

VariantTable robustness_variant(const std::vector<ImportEvent>& ordered,
                                const ExperienceTable& exp,
                                const VariantSpec& spec) {
    std::map<std::string, std::vector<ImportEvent>> by_lang;
    for (const ImportEvent& ev : ordered) by_lang[ev.lang].push_back(ev);

    novelty::EngineConfig cfg;
    cfg.threshold = spec.threshold;
    cfg.semantics = spec.semantics;
    const int threshold = novelty::effective_threshold(cfg);

    std::vector<io::FlagRow> flags;
    for (const auto& [lang, events] : by_lang) {
        const novelty::CountMap counts = novelty::count_frequencies(events);
        const novelty::EligibilitySet eligible = novelty::build_eligibility(counts, threshold);
        for (const PostFlags& pf : novelty::novelty_flags_per_post(events, eligible)) {
            flags.push_back({lang, pf});
        }
    }

    VariantTable table;
    table.name = variant_name(spec);
    table.spec = spec;
    const std::vector<JoinedRow> rows = join_flags(flags, exp, spec.year, &table.stats);
    table.rows = novelty_rate_by_bin(rows);
    return table;
}

} // namespace ecolens::users
