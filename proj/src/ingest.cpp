#include "ecolens/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "ecolens/text.hpp"

namespace ecolens::ingest {

const std::vector<std::string>& default_ecosystems() {
    static const std::vector<std::string> eco = {
        "cpp",  "csharp", "java",       "javascript", "perl",  "php",
        "python", "r",    "ruby",       "rust",       "swift", "objectivec",
    };
    return eco;
}

TagAliasMap default_alias_map() {
    TagAliasMap m;
    for (const auto& e : default_ecosystems()) m[e] = e;
    m["python-3.x"] = "python";
    m["python-2.7"] = "python";
    m["node.js"] = "javascript";
    m["c++"] = "cpp";
    m["c++11"] = "cpp";
    m["c++14"] = "cpp";
    m["c++17"] = "cpp";
    m["c++20"] = "cpp";
    m["objective-c"] = "objectivec";
    m["c#"] = "csharp";
    return m;
}

std::vector<std::string> resolve_languages(
    const RawPost& post,
    const std::unordered_map<std::int64_t, std::vector<std::string>>& question_tags,
    const TagAliasMap& aliases, std::uint64_t* orphan_counter) {
    const std::vector<std::string>* tags = &post.tags;
    if (post.type == PostType::answer) {
        if (!post.parent_id) return {};
        auto it = question_tags.find(*post.parent_id);
        if (it == question_tags.end()) {
            if (orphan_counter) ++*orphan_counter;
            return {};
        }
        tags = &it->second;
    }
    std::set<std::string> langs;
    for (const auto& t : *tags) {
        auto it = aliases.find(t);
        if (it != aliases.end()) langs.insert(it->second);
    }
    return {langs.begin(), langs.end()};
}

namespace {

// case-sensitive tag open: "<name" followed by '>' or whitespace/attr
std::size_t find_tag_open(const std::string& s, std::size_t from, const char* name,
                          std::size_t* content_start) {
    std::size_t nlen = std::char_traits<char>::length(name);
    for (std::size_t pos = s.find(name, from); pos != std::string::npos;
         pos = s.find(name, pos + 1)) {
        std::size_t after = pos + nlen;
        if (after < s.size() && s[after] != '>' && s[after] != ' ' && s[after] != '\t' &&
            s[after] != '\n' && s[after] != '\r' && s[after] != '/')
            continue; // e.g. "<precision"
        std::size_t gt = s.find('>', after);
        if (gt == std::string::npos) return std::string::npos;
        *content_start = gt + 1;
        return pos;
    }
    return std::string::npos;
}

} // namespace

std::vector<std::string> extract_snippets(const std::string& body_html) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < body_html.size()) {
        std::size_t after_pre = 0;
        std::size_t pre = find_tag_open(body_html, pos, "<pre", &after_pre);
        if (pre == std::string::npos) break;
        // the code block must open immediately inside the pre (whitespace ok)
        std::size_t p = after_pre;
        while (p < body_html.size() &&
               (body_html[p] == ' ' || body_html[p] == '\t' || body_html[p] == '\n' ||
                body_html[p] == '\r'))
            ++p;
        std::size_t content = 0;
        if (body_html.compare(p, 5, "<code") == 0 &&
            find_tag_open(body_html, p, "<code", &content) == p) {
            std::size_t end = body_html.find("</code>", content);
            std::size_t pre_end = body_html.find("</pre>", content);
            if (end == std::string::npos) end = pre_end; // unclosed: clip at pre
            if (end == std::string::npos) end = body_html.size();
            out.push_back(text::decode_entities(
                std::string_view(body_html).substr(content, end - content)));
            pos = end;
        } else {
            pos = after_pre; // bare <pre> without code: not a snippet
        }
    }
    return out;
}

void order_stream(std::vector<SnippetPost>& posts) {
    std::stable_sort(posts.begin(), posts.end(), [](const SnippetPost& a, const SnippetPost& b) {
        if (a.ts_ms != b.ts_ms) return a.ts_ms < b.ts_ms;
        return a.post_id < b.post_id;
    });
}

std::vector<SnippetPost> extract_batch_serial(const std::vector<RawPost>& posts,
                                              const std::vector<std::vector<std::string>>& langs,
                                              IngestStats& stats) {
    std::vector<SnippetPost> slots(posts.size());
    std::vector<char> keep(posts.size(), 0);
    for (std::size_t i = 0; i < posts.size(); ++i) {
        if (langs[i].empty()) continue;
        auto snippets = extract_snippets(posts[i].body_html);
        if (snippets.empty()) continue;
        slots[i] = SnippetPost{posts[i].id, posts[i].creation_ts_ms, posts[i].owner_user_id,
                               langs[i], std::move(snippets)};
        keep[i] = 1;
    }
    std::vector<SnippetPost> out;
    out.reserve(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i) {
        if (langs[i].empty()) {
            ++stats.no_language;
        } else if (!keep[i]) {
            ++stats.no_snippets;
        } else {
            out.push_back(std::move(slots[i]));
            ++stats.emitted;
        }
    }
    return out;
}

std::vector<SnippetPost> extract_batch(const std::vector<RawPost>& posts,
                                       const std::vector<std::vector<std::string>>& langs,
                                       IngestStats& stats) {
#ifdef _OPENMP
    std::vector<SnippetPost> slots(posts.size());
    std::vector<char> keep(posts.size(), 0);
#pragma omp parallel for schedule(dynamic, 64)
    for (long long i = 0; i < (long long)posts.size(); ++i) {
        if (langs[i].empty()) continue;
        auto snippets = extract_snippets(posts[i].body_html);
        if (snippets.empty()) continue;
        slots[i] = SnippetPost{posts[i].id, posts[i].creation_ts_ms, posts[i].owner_user_id,
                               langs[i], std::move(snippets)};
        keep[i] = 1;
    }
    // deterministic, index-ordered collection
    std::vector<SnippetPost> out;
    out.reserve(posts.size());
    for (std::size_t i = 0; i < posts.size(); ++i) {
        if (langs[i].empty()) {
            ++stats.no_language;
        } else if (!keep[i]) {
            ++stats.no_snippets;
        } else {
            out.push_back(std::move(slots[i]));
            ++stats.emitted;
        }
    }
    return out;
#else
    return extract_batch_serial(posts, langs, stats);
#endif
}

std::vector<SnippetPost> ingest_dump(const std::string& xml_path, const TagAliasMap& aliases,
                                     IngestStats& stats) {
    // pass 1: question-id -> tags (the dump does not order parents first)
    std::unordered_map<std::int64_t, std::vector<std::string>> question_tags;
    {
        std::ifstream in(xml_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open dump: " + xml_path);
        xml::DumpStats pass1;
        xml::scan_posts(
            in,
            [&](RawPost&& p) {
                if (p.type == PostType::question) question_tags[p.id] = std::move(p.tags);
            },
            pass1);
        stats.questions_indexed = question_tags.size();
    }

    // pass 2: resolve languages, extract snippets in batches
    std::vector<SnippetPost> out;
    std::vector<RawPost> batch;
    std::vector<std::vector<std::string>> batch_langs;
    constexpr std::size_t kBatch = 4096;

    auto flush = [&]() {
        if (batch.empty()) return;
        auto got = extract_batch(batch, batch_langs, stats);
        out.insert(out.end(), std::make_move_iterator(got.begin()),
                   std::make_move_iterator(got.end()));
        batch.clear();
        batch_langs.clear();
    };

    std::ifstream in(xml_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dump: " + xml_path);
    xml::scan_posts(
        in,
        [&](RawPost&& p) {
            batch_langs.push_back(
                resolve_languages(p, question_tags, aliases, &stats.orphan_answers));
            batch.push_back(std::move(p));
            if (batch.size() >= kBatch) flush();
        },
        stats.dump);
    flush();

    order_stream(out);
    return out;
}

} // namespace ecolens::ingest
