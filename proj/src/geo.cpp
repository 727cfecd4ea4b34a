#include "ecolens/geo.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ecolens/text.hpp"

namespace ecolens::geo {

namespace {

const std::unordered_set<std::string>& assigned_codes() {
    static const char* kCodes =
        "AD AE AF AG AI AL AM AO AQ AR AS AT AU AW AX AZ "
        "BA BB BD BE BF BG BH BI BJ BL BM BN BO BQ BR BS BT BV BW BY BZ "
        "CA CC CD CF CG CH CI CK CL CM CN CO CR CU CV CW CX CY CZ "
        "DE DJ DK DM DO DZ EC EE EG EH ER ES ET FI FJ FK FM FO FR "
        "GA GB GD GE GF GG GH GI GL GM GN GP GQ GR GS GT GU GW GY "
        "HK HM HN HR HT HU ID IE IL IM IN IO IQ IR IS IT JE JM JO JP "
        "KE KG KH KI KM KN KP KR KW KY KZ LA LB LC LI LK LR LS LT LU LV LY "
        "MA MC MD ME MF MG MH MK ML MM MN MO MP MQ MR MS MT MU MV MW MX MY MZ "
        "NA NC NE NF NG NI NL NO NP NR NU NZ OM "
        "PA PE PF PG PH PK PL PM PN PR PS PT PW PY QA RE RO RS RU RW "
        "SA SB SC SD SE SG SH SI SJ SK SL SM SN SO SR SS ST SV SX SY SZ "
        "TC TD TF TG TH TJ TK TL TM TN TO TR TT TV TW TZ UA UG UM US UY UZ "
        "VA VC VE VG VI VN VU WF WS YE YT ZA ZM ZW";
    static const std::unordered_set<std::string> set = [] {
        std::unordered_set<std::string> s;
        std::istringstream in(kCodes);
        std::string code;
        while (in >> code) s.insert(code);
        return s;
    }();
    return set;
}

std::string upper2(const std::string& code) {
    std::string out;
    out.reserve(code.size());
    for (char c : code) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

} // namespace

bool valid_country_code(const std::string& code) {
    if (code.size() != 2) return false;
    return assigned_codes().count(upper2(code)) > 0;
}

UserCountryMap load_user_countries(const std::string& path, LoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open user-country file: " + path);
    UserCountryMap map;
    LoadStats local;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = io::csv_split(line);
        if (first) {
            first = false;
            // tolerate a header row: first field not an integer
            if (!fields.empty() && fields[0].find_first_not_of("0123456789-") != std::string::npos) {
                continue;
            }
        }
        if (fields.size() != 2) {
            ++local.malformed;
            continue;
        }
        std::int64_t user = 0;
        try {
            user = std::stoll(text::trim(fields[0]));
        } catch (const std::exception&) {
            ++local.malformed;
            continue;
        }
        const std::string code = upper2(text::trim(fields[1]));
        if (!valid_country_code(code)) {
            ++local.invalid_code;
            continue;
        }
        map[user] = code;
        ++local.loaded;
    }
    if (stats) *stats = local;
    return map;
}

GeoResult country_novelty_rates(const std::vector<io::FlagRow>& flags,
                                const UserCountryMap& map,
                                std::int64_t min_posts) {
    if (min_posts < 1) throw std::invalid_argument("min_posts must be >= 1");
    struct Counter {
        std::int64_t posts = 0;
        std::int64_t simple = 0;
        std::int64_t pair = 0;
    };
    std::map<std::string, Counter> by_country;
    Counter global;
    GeoResult out;
    for (const io::FlagRow& fr : flags) {
        if (!fr.flags.user_id) {
            ++out.anonymous;
            continue;
        }
        auto it = map.find(*fr.flags.user_id);
        if (it == map.end()) {
            ++out.unmapped;
            continue;
        }
        ++out.mapped;
        for (Counter* c : {&global, &by_country[it->second]}) {
            ++c->posts;
            if (fr.flags.has_simple) ++c->simple;
            if (fr.flags.has_pair) ++c->pair;
        }
    }
    if (out.mapped == 0) return out; // empty table; caller reports it
    auto rate = [](std::int64_t hits, std::int64_t posts) {
        return static_cast<double>(hits) / static_cast<double>(posts);
    };
    out.rows.push_back({"ALL", global.posts, rate(global.simple, global.posts),
                        rate(global.pair, global.posts)});
    for (const auto& [code, c] : by_country) {
        if (c.posts < min_posts) {
            ++out.suppressed;
            continue;
        }
        out.rows.push_back({code, c.posts, rate(c.simple, c.posts), rate(c.pair, c.posts)});
    }
    return out;
}

} // namespace ecolens::geo
