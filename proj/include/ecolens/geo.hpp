#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecolens/io.hpp"

namespace ecolens::geo {

// ISO 3166-1 alpha-2, officially assigned codes only (so "XX" is invalid,
// and it is "GB", not "UK"). Case-insensitive.
bool valid_country_code(const std::string& code);

using UserCountryMap = std::unordered_map<std::int64_t, std::string>;

struct LoadStats {
    std::int64_t loaded = 0;
    std::int64_t invalid_code = 0; // skipped rows, per the one-counter contract
    std::int64_t malformed = 0;    // wrong column count / unparseable user id
};

// CSV of (user_id, country_code); an optional header row is tolerated.
// Unreadable file throws; bad rows are counted and skipped.
UserCountryMap load_user_countries(const std::string& path, LoadStats* stats = nullptr);

struct CountryRow {
    std::string country; // alpha-2 code, or "ALL" for the global-average row
    std::int64_t posts = 0;
    double simple_rate = 0.0;
    double pair_rate = 0.0;
};

struct GeoResult {
    // "ALL" first (average over every mapped row, not over country rates),
    // then surviving countries in code order.
    std::vector<CountryRow> rows;
    std::int64_t mapped = 0;
    std::int64_t unmapped = 0;   // known user, no country entry
    std::int64_t anonymous = 0;  // no user id
    std::int64_t suppressed = 0; // countries under min_posts
};

// The unit is one (language, post) flag row; countries with fewer than
// min_posts such rows are suppressed.
GeoResult country_novelty_rates(const std::vector<io::FlagRow>& flags,
                                const UserCountryMap& map,
                                std::int64_t min_posts = 1000);

} // namespace ecolens::geo
