#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecolens/io.hpp"
#include "ecolens/novelty.hpp"
#include "ecolens/types.hpp"

namespace ecolens::users {

// Decade bins over prior-post counts: {0}, [1,10], [11,100], [101,1000],
// [1001, inf). Together they partition the non-negative integers.
struct ExperienceBin {
    const char* label;
    std::int64_t lo;
    std::int64_t hi; // -1 = unbounded
};

const std::array<ExperienceBin, 5>& bins();
int bin_of(std::int64_t experience);

// What counts as a prior post: import-bearing events (default) or any
// snippet-carrying post tagged with the language.
enum class ExperienceSource { events, snippet_posts };

ExperienceSource experience_source_from_string(const std::string& s);
std::string to_string(ExperienceSource s);

struct ExperienceTable {
    // (lang, post_id) -> number of this user's prior qualifying posts in lang
    std::map<std::pair<std::string, std::int64_t>, std::int64_t> by_post;
    std::int64_t anonymous = 0; // rows without a user id, excluded
};

// Streams must be ordered ascending by (ts, post_id).
ExperienceTable experience_from_events(const std::vector<ImportEvent>& ordered);
ExperienceTable experience_from_posts(const std::vector<SnippetPost>& ordered);

// Direct prefix count for one lookup; the per-post table must agree with it.
std::int64_t experience_at_post(const std::vector<ImportEvent>& ordered,
                                std::int64_t user_id, const std::string& lang,
                                std::int64_t ts_ms, std::int64_t post_id);

// One (lang, post) analysis row: a post tagged with two ecosystems
// contributes two rows.
struct JoinedRow {
    std::string lang;
    std::int64_t post_id = 0;
    std::int64_t ts_ms = 0;
    std::int64_t experience = 0;
    bool has_simple = false;
    bool has_pair = false;
};

struct JoinStats {
    std::int64_t analyzed = 0;
    std::int64_t anonymous = 0;
    std::int64_t outside_year = 0;
};

// Joins per-post novelty flags with experience. Rows without a user id are
// excluded and counted; `year` (creation year) filters the analyzed
// population without touching experience or eligibility.
std::vector<JoinedRow> join_flags(const std::vector<io::FlagRow>& flags,
                                  const ExperienceTable& exp,
                                  std::optional<int> year, JoinStats* stats);

struct BinRateRow {
    std::string ecosystem; // "pooled", then one block per language
    int bin = 0;
    std::string label;
    std::int64_t posts = 0;
    std::optional<double> simple_rate; // absent when the bin is empty
    std::optional<double> pair_rate;
};

// All five bins are emitted for the pooled block and for every language
// present; pooled counts are the sum of the per-language blocks.
std::vector<BinRateRow> novelty_rate_by_bin(const std::vector<JoinedRow>& rows);

// A robustness variant: eligibility recomputed from the full corpus at the
// given adoption threshold, optionally tabulating only posts from one year.
struct VariantSpec {
    int threshold = 10;
    novelty::ThresholdSemantics semantics = novelty::ThresholdSemantics::total;
    std::optional<int> year;
};

std::string variant_name(const VariantSpec& spec); // e.g. "t100", "t1000_y2016"

struct VariantTable {
    std::string name;
    VariantSpec spec;
    std::vector<BinRateRow> rows;
    JoinStats stats;
};

// `ordered` is the full mixed-ecosystem stream; flags are recomputed per
// language under the variant's threshold before joining.
VariantTable robustness_variant(const std::vector<ImportEvent>& ordered,
                                const ExperienceTable& exp,
                                const VariantSpec& spec);

} // namespace ecolens::users
