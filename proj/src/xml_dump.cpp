#include "ecolens/xml_dump.hpp"

#include <charconv>
#include <string>
#include <utility>
#include <vector>

#include "ecolens/text.hpp"

namespace ecolens::xml {

namespace {

std::optional<std::int64_t> to_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// name="value" pairs; values entity-decoded once.
std::vector<std::pair<std::string_view, std::string>> parse_attrs(std::string_view s) {
    std::vector<std::pair<std::string_view, std::string>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
        std::size_t name_start = i;
        while (i < s.size() && s[i] != '=' && s[i] != ' ') ++i;
        if (i >= s.size() || s[i] != '=') break;
        std::string_view name = s.substr(name_start, i - name_start);
        ++i;
        if (i >= s.size() || s[i] != '"') break;
        ++i;
        std::size_t val_start = i;
        while (i < s.size() && s[i] != '"') ++i;
        if (i >= s.size()) break; // unterminated value
        out.emplace_back(name, text::decode_entities(s.substr(val_start, i - val_start)));
        ++i;
    }
    return out;
}

} // namespace

std::optional<RawPost> parse_row(std::string_view attrs) {
    RawPost p;
    bool has_id = false, has_type = false, has_ts = false;
    int type_id = 0;
    for (auto& [name, value] : parse_attrs(attrs)) {
        if (name == "Id") {
            auto v = to_int(value);
            if (!v || *v <= 0) return std::nullopt;
            p.id = *v;
            has_id = true;
        } else if (name == "PostTypeId") {
            auto v = to_int(value);
            if (!v) return std::nullopt;
            type_id = (int)*v;
            has_type = true;
        } else if (name == "ParentId") {
            auto v = to_int(value);
            if (v && *v > 0) p.parent_id = *v;
        } else if (name == "CreationDate") {
            auto ts = text::parse_timestamp_ms(value);
            if (!ts) return std::nullopt;
            p.creation_ts_ms = *ts;
            has_ts = true;
        } else if (name == "Tags") {
            p.tags = text::parse_tag_list(value);
        } else if (name == "Body") {
            p.body_html = value;
        } else if (name == "OwnerUserId") {
            auto v = to_int(value);
            if (v && *v > 0) p.owner_user_id = *v;
        }
    }
    if (!has_id || !has_type || !has_ts) return std::nullopt;
    if (type_id == 1) {
        p.type = PostType::question;
        p.parent_id.reset();
    } else if (type_id == 2) {
        p.type = PostType::answer;
        p.tags.clear();
        if (!p.parent_id) return std::nullopt; // answers must point at a question
    } else {
        p.type = PostType::other;
    }
    return p;
}

void scan_posts(std::istream& in, const std::function<void(RawPost&&)>& sink, DumpStats& stats) {
    std::string buf;
    std::string chunk(1 << 20, '\0');

    // Processes complete rows in buf, then discards the consumed prefix in
    // one erase. Returns with buf holding only an unfinished tail.
    auto drain = [&](bool final_pass) {
        std::size_t pos = 0;
        for (;;) {
            std::size_t row_start = buf.find("<row", pos);
            if (row_start == std::string::npos) {
                // keep a short tail in case "<row" straddles the chunk edge
                pos = buf.size() > 4 ? buf.size() - 4 : 0;
                break;
            }
            // locate the matching "/>", ignoring '>' inside quoted values
            std::size_t i = row_start + 4;
            bool in_quotes = false;
            std::size_t row_end = std::string::npos;
            for (; i < buf.size(); ++i) {
                char c = buf[i];
                if (c == '"') {
                    in_quotes = !in_quotes;
                } else if (!in_quotes && c == '/' && i + 1 < buf.size() && buf[i + 1] == '>') {
                    row_end = i;
                    break;
                }
            }
            if (row_end == std::string::npos) {
                if (final_pass) {
                    // truncated trailing row
                    ++stats.rows;
                    ++stats.skipped_malformed;
                    pos = buf.size();
                } else {
                    pos = row_start; // need more input
                }
                break;
            }
            ++stats.rows;
            std::string_view attrs(buf.data() + row_start + 4, row_end - row_start - 4);
            auto post = parse_row(attrs);
            if (!post) {
                ++stats.skipped_malformed;
            } else if (post->type == PostType::other) {
                ++stats.skipped_other;
            } else {
                ++stats.emitted;
                sink(std::move(*post));
            }
            pos = row_end + 2;
        }
        buf.erase(0, pos);
    };

    while (in.good()) {
        in.read(chunk.data(), (std::streamsize)chunk.size());
        std::streamsize got = in.gcount();
        if (got <= 0) break;
        buf.append(chunk.data(), (std::size_t)got);
        drain(false);
    }
    drain(true);
}

} // namespace ecolens::xml
