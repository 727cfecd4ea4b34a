#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <optional>

#include "ecolens/geo.hpp"

using namespace ecolens;

namespace {

io::FlagRow frow(std::int64_t post_id, std::optional<std::int64_t> user,
                 bool simple, bool pair, const std::string& lang = "python") {
    io::FlagRow r;
    r.lang = lang;
    r.flags = {post_id, post_id * 1000, user, simple, pair};
    return r;
}

std::string write_csv(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("country code validation follows the assigned iso set") {
    CHECK(geo::valid_country_code("DE"));
    CHECK(geo::valid_country_code("us")); // case-insensitive
    CHECK(geo::valid_country_code("GB"));
    CHECK(geo::valid_country_code("IN"));
    CHECK_FALSE(geo::valid_country_code("UK")); // GB is the assigned code
    CHECK_FALSE(geo::valid_country_code("XX"));
    CHECK_FALSE(geo::valid_country_code("ZZ"));
    CHECK_FALSE(geo::valid_country_code(""));
    CHECK_FALSE(geo::valid_country_code("DEU")); // alpha-3 rejected
}

TEST_CASE("user-country csv loads, validates and counts") {
    const auto path = write_csv("ecolens_geo_ok.csv",
                                "user_id,country\n"
                                "42,DE\n"
                                "43,XX\n"      // unassigned code
                                "44,us\n"      // normalized to upper case
                                "not-a-user,FR\n"
                                "45\n"         // missing column
                                "46,GB\r\n"    // CRLF survives
                                "42,FR\n");    // duplicate: last wins
    geo::LoadStats stats;
    auto map = geo::load_user_countries(path, &stats);
    CHECK(stats.loaded == 4); // four rows accepted, one a duplicate key
    CHECK(stats.invalid_code == 1);
    CHECK(stats.malformed == 2);
    REQUIRE(map.size() == 3);
    CHECK(map.at(42) == "FR");
    CHECK(map.at(44) == "US");
    CHECK(map.at(46) == "GB");
    CHECK(map.count(43) == 0);

    CHECK_THROWS_AS(geo::load_user_countries("/tmp/ecolens_geo_nope.csv", nullptr),
                    std::runtime_error);
}

TEST_CASE("suppression boundary sits exactly at min_posts") {
    geo::UserCountryMap map;
    for (std::int64_t u = 0; u < 10; ++u) map[u] = u < 4 ? "DE" : "FR";

    // DE: 3 posts, FR: 4 posts
    std::vector<io::FlagRow> flags;
    for (std::int64_t p = 1; p <= 3; ++p) flags.push_back(frow(p, p % 4, p == 1, false));
    for (std::int64_t p = 4; p <= 7; ++p) flags.push_back(frow(p, 4 + p % 6, p == 4, false));

    auto strict = geo::country_novelty_rates(flags, map, 4);
    REQUIRE(strict.rows.size() == 2); // ALL + FR; DE is one post short
    CHECK(strict.rows[0].country == "ALL");
    CHECK(strict.rows[1].country == "FR");
    CHECK(strict.suppressed == 1);

    auto lax = geo::country_novelty_rates(flags, map, 3);
    REQUIRE(lax.rows.size() == 3);
    CHECK(lax.rows[1].country == "DE");
    CHECK(lax.rows[2].country == "FR");
    CHECK(lax.suppressed == 0);

    CHECK_THROWS_AS(geo::country_novelty_rates(flags, map, 0), std::invalid_argument);
}

TEST_CASE("the global row averages posts, not countries") {
    geo::UserCountryMap map{{1, "DE"}, {2, "FR"}};
    std::vector<io::FlagRow> flags;
    // DE: 8 posts, half novel; FR: 2 posts, none novel
    for (std::int64_t p = 1; p <= 8; ++p) flags.push_back(frow(p, 1, p % 2 == 0, false));
    flags.push_back(frow(9, 2, false, false));
    flags.push_back(frow(10, 2, false, false));

    auto res = geo::country_novelty_rates(flags, map, 1);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[0].country == "ALL");
    CHECK(res.rows[0].posts == 10);
    // post-weighted: 4/10, not the country average (0.5 + 0)/2
    CHECK(res.rows[0].simple_rate == doctest::Approx(0.4));
    CHECK(res.mapped == 10);
}

TEST_CASE("a single surviving country matches the global row exactly") {
    geo::UserCountryMap map{{7, "JP"}};
    std::vector<io::FlagRow> flags;
    for (std::int64_t p = 1; p <= 6; ++p) flags.push_back(frow(p, 7, p <= 2, p == 1));

    auto res = geo::country_novelty_rates(flags, map, 1);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].country == "ALL");
    CHECK(res.rows[1].country == "JP");
    CHECK(res.rows[0].posts == res.rows[1].posts);
    CHECK(res.rows[0].simple_rate == res.rows[1].simple_rate); // bit-identical
    CHECK(res.rows[0].pair_rate == res.rows[1].pair_rate);
}

TEST_CASE("unmapped and anonymous posts are counted, not analyzed") {
    geo::UserCountryMap map{{1, "DE"}};
    std::vector<io::FlagRow> flags;
    flags.push_back(frow(1, 1, true, false));
    flags.push_back(frow(2, 99, false, false));          // user not in the map
    flags.push_back(frow(3, std::nullopt, false, false)); // anonymous

    auto res = geo::country_novelty_rates(flags, map, 1);
    CHECK(res.mapped == 1);
    CHECK(res.unmapped == 1);
    CHECK(res.anonymous == 1);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].posts == 1);

    auto empty = geo::country_novelty_rates(flags, geo::UserCountryMap{}, 1);
    CHECK(empty.rows.empty());
    CHECK(empty.mapped == 0);
}
