#include "ecolens/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>

namespace ecolens::text {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7f) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7ff) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp <= 0xffff) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp <= 0x10ffff) {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

// days since 1970-01-01 for a civil date (proleptic Gregorian)
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool parse_uint(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

} // namespace

std::string decode_entities(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    size_t i = 0;
    while (i < in.size()) {
        char c = in[i];
        if (c != '&') {
            out.push_back(c);
            ++i;
            continue;
        }
        size_t semi = in.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(c);
            ++i;
            continue;
        }
        std::string_view name = in.substr(i + 1, semi - i - 1);
        if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "amp") out.push_back('&');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out.push_back(' ');
        else if (!name.empty() && name[0] == '#') {
            std::uint32_t cp = 0;
            bool ok = false;
            if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                for (size_t k = 2; k < name.size(); ++k) {
                    char h = name[k];
                    std::uint32_t v;
                    if (h >= '0' && h <= '9') v = static_cast<std::uint32_t>(h - '0');
                    else if (h >= 'a' && h <= 'f') v = static_cast<std::uint32_t>(h - 'a' + 10);
                    else if (h >= 'A' && h <= 'F') v = static_cast<std::uint32_t>(h - 'A' + 10);
                    else { ok = false; break; }
                    cp = cp * 16 + v;
                    ok = true;
                }
            } else {
                for (size_t k = 1; k < name.size(); ++k) {
                    char h = name[k];
                    if (h < '0' || h > '9') { ok = false; break; }
                    cp = cp * 10 + static_cast<std::uint32_t>(h - '0');
                    ok = true;
                }
            }
            if (ok && cp <= 0x10ffff) append_utf8(out, cp);
            else out.append(in.substr(i, semi - i + 1));
        } else {
            out.append(in.substr(i, semi - i + 1));
            i = semi + 1;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

std::optional<std::int64_t> parse_timestamp_ms(std::string_view s) {
    // YYYY-MM-DDTHH:MM:SS with optional .fff
    int y, mo, d, h, mi, sec;
    if (s.size() < 19) return std::nullopt;
    if (!parse_uint(s, 0, 4, y)) return std::nullopt;
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ')) return std::nullopt;
    if (!parse_uint(s, 5, 2, mo) || !parse_uint(s, 8, 2, d)) return std::nullopt;
    if (s[13] != ':' || s[16] != ':') return std::nullopt;
    if (!parse_uint(s, 11, 2, h) || !parse_uint(s, 14, 2, mi) || !parse_uint(s, 17, 2, sec))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60)
        return std::nullopt;
    int ms = 0;
    if (s.size() > 19) {
        if (s[19] != '.') return std::nullopt;
        int mult = 100;
        for (size_t i = 20; i < s.size() && i < 23; ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            ms += (s[i] - '0') * mult;
            mult /= 10;
        }
    }
    std::int64_t days = days_from_civil(y, mo, d);
    return ((days * 24 + h) * 60 + mi) * 60000 + static_cast<std::int64_t>(sec) * 1000 + ms;
}

std::string format_timestamp_ms(std::int64_t ms) {
    std::int64_t total_s = ms / 1000;
    int msec = static_cast<int>(ms % 1000);
    if (msec < 0) { msec += 1000; total_s -= 1; }
    std::int64_t days = total_s / 86400;
    int sod = static_cast<int>(total_s % 86400);
    if (sod < 0) { sod += 86400; days -= 1; }
    int y, mo, d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03d", y, mo, d,
                  sod / 3600, (sod / 60) % 60, sod % 60, msec);
    return buf;
}

int year_of_ms(std::int64_t ms) {
    std::int64_t total_s = ms / 1000;
    std::int64_t days = total_s / 86400;
    if (total_s % 86400 < 0) days -= 1;
    int y, mo, d;
    civil_from_days(days, y, mo, d);
    return y;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> parse_tag_list(std::string_view raw) {
    std::vector<std::string> tags;
    if (raw.empty()) return tags;
    if (raw.find('<') != std::string_view::npos) {
        size_t i = 0;
        while (i < raw.size()) {
            size_t a = raw.find('<', i);
            if (a == std::string_view::npos) break;
            size_t b = raw.find('>', a + 1);
            if (b == std::string_view::npos) break;
            std::string t = to_lower(trim(raw.substr(a + 1, b - a - 1)));
            if (!t.empty()) tags.push_back(std::move(t));
            i = b + 1;
        }
        return tags;
    }
    if (raw.find('|') != std::string_view::npos) {
        size_t i = 0;
        while (i <= raw.size()) {
            size_t b = raw.find('|', i);
            size_t end = (b == std::string_view::npos) ? raw.size() : b;
            std::string t = to_lower(trim(raw.substr(i, end - i)));
            if (!t.empty()) tags.push_back(std::move(t));
            if (b == std::string_view::npos) break;
            i = b + 1;
        }
        return tags;
    }
    std::string t = to_lower(trim(raw));
    if (!t.empty()) tags.push_back(std::move(t));
    return tags;
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::optional<std::uint64_t> digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        std::streamsize got = in.gcount();
        if (got <= 0) break;
        h = fnv1a64(std::string_view(buf.data(), static_cast<size_t>(got)), h);
    }
    return h;
}

} // namespace ecolens::text
