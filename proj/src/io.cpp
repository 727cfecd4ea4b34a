#include "ecolens/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "ecolens/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ecolens::io {

std::string csv_escape(std::string_view field) {
    bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << csv_escape(fields[i]);
    }
    out.put('\n');
}

std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r') {
            // drop
        } else {
            cur.push_back(c);
        }
        ++i;
    }
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

std::optional<std::int64_t> json_ts(const json& j) {
    if (j.is_number()) return j.get<std::int64_t>();
    if (j.is_string()) return text::parse_timestamp_ms(j.get<std::string>());
    return std::nullopt;
}

} // namespace

std::vector<SnippetPost> read_snippet_posts(const std::string& path, LineDiagnostics* diag) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snippet corpus: " + path);
    std::vector<SnippetPost> posts;
    std::string line;
    LineDiagnostics d;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++d.read;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) { ++d.skipped; continue; }
        SnippetPost p;
        try {
            p.post_id = j.at("post_id").get<std::int64_t>();
            auto ts = json_ts(j.at("ts"));
            if (!ts) { ++d.skipped; continue; }
            p.ts_ms = *ts;
            if (j.contains("user_id") && !j["user_id"].is_null())
                p.user_id = j["user_id"].get<std::int64_t>();
            p.langs = j.at("langs").get<std::vector<std::string>>();
            p.snippets = j.at("snippets").get<std::vector<std::string>>();
        } catch (const json::exception&) {
            ++d.skipped;
            continue;
        }
        if (p.langs.empty() || p.snippets.empty()) { ++d.skipped; continue; }
        posts.push_back(std::move(p));
    }
    if (diag) *diag = d;
    return posts;
}

std::string snippet_post_to_json(const SnippetPost& p) {
    json j;
    j["post_id"] = p.post_id;
    j["ts"] = p.ts_ms;
    if (p.user_id) j["user_id"] = *p.user_id;
    j["langs"] = p.langs;
    j["snippets"] = p.snippets;
    return j.dump();
}

void write_snippet_posts(const std::string& path, const std::vector<SnippetPost>& posts) {
    AtomicFile f(path);
    for (const auto& p : posts) f.stream() << snippet_post_to_json(p) << '\n';
    f.commit();
}

std::vector<ImportEvent> read_events(const std::string& path, LineDiagnostics* diag) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event corpus: " + path);
    std::vector<ImportEvent> events;
    std::string line;
    LineDiagnostics d;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++d.read;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) { ++d.skipped; continue; }
        ImportEvent e;
        try {
            e.post_id = j.at("post_id").get<std::int64_t>();
            auto ts = json_ts(j.at("ts"));
            if (!ts) { ++d.skipped; continue; }
            e.ts_ms = *ts;
            if (j.contains("user_id") && !j["user_id"].is_null())
                e.user_id = j["user_id"].get<std::int64_t>();
            e.lang = j.at("lang").get<std::string>();
            e.libs = j.at("libs").get<std::vector<std::string>>();
        } catch (const json::exception&) {
            ++d.skipped;
            continue;
        }
        if (e.lang.empty() || e.libs.empty()) { ++d.skipped; continue; }
        events.push_back(std::move(e));
    }
    if (diag) *diag = d;
    return events;
}

std::string event_to_json(const ImportEvent& e) {
    json j;
    j["post_id"] = e.post_id;
    j["ts"] = e.ts_ms;
    if (e.user_id) j["user_id"] = *e.user_id;
    j["lang"] = e.lang;
    j["libs"] = e.libs;
    return j.dump();
}

void write_events(const std::string& path, const std::vector<ImportEvent>& events) {
    AtomicFile f(path);
    for (const auto& e : events) f.stream() << event_to_json(e) << '\n';
    f.commit();
}

void write_flags_csv(const std::string& path, const std::vector<FlagRow>& rows) {
    AtomicFile f(path);
    f.stream() << "lang,post_id,ts,user_id,has_simple,has_pair\n";
    for (const auto& r : rows) {
        csv_row(f.stream(), {r.lang, std::to_string(r.flags.post_id), std::to_string(r.flags.ts_ms),
                             r.flags.user_id ? std::to_string(*r.flags.user_id) : "",
                             r.flags.has_simple ? "1" : "0", r.flags.has_pair ? "1" : "0"});
    }
    f.commit();
}

std::vector<FlagRow> read_flags_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open flags table: " + path);
    std::vector<FlagRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) { header = false; continue; }
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != 6) throw std::runtime_error("bad flags row: " + line);
        FlagRow r;
        r.lang = f[0];
        r.flags.post_id = std::stoll(f[1]);
        r.flags.ts_ms = std::stoll(f[2]);
        if (!f[3].empty()) r.flags.user_id = std::stoll(f[3]);
        r.flags.has_simple = f[4] == "1";
        r.flags.has_pair = f[5] == "1";
        rows.push_back(std::move(r));
    }
    return rows;
}

AtomicFile::AtomicFile(const std::string& path) : path_(path) {
    const char* tmpdir = std::getenv("ECOLENS_TMPDIR");
    if (tmpdir && *tmpdir) {
        tmp_ = (fs::path(tmpdir) / (fs::path(path).filename().string() + ".tmp")).string();
    } else {
        tmp_ = path + ".tmp";
    }
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open output: " + tmp_);
}

void AtomicFile::commit() {
    out_.flush();
    if (!out_.good()) throw std::runtime_error("write failed: " + tmp_);
    out_.close();
    std::error_code ec;
    fs::rename(tmp_, path_, ec);
    if (ec) {
        // cross-device fallback
        fs::copy_file(tmp_, path_, fs::copy_options::overwrite_existing, ec);
        if (ec) throw std::runtime_error("cannot place output at " + path_ + ": " + ec.message());
        fs::remove(tmp_, ec);
    }
    committed_ = true;
}

AtomicFile::~AtomicFile() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        fs::remove(tmp_, ec);
    }
}

} // namespace ecolens::io
