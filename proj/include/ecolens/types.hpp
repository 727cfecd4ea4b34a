#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ecolens {

enum class PostType { question, answer, other };

// One row of the Q&A dump, as parsed. Answers carry no tags of their own;
// questions carry no parent.
struct RawPost {
    std::int64_t id = 0;
    PostType type = PostType::other;
    std::optional<std::int64_t> parent_id;
    std::int64_t creation_ts_ms = 0; // UTC epoch milliseconds
    std::vector<std::string> tags;   // lowercase, questions only
    std::string body_html;
    std::optional<std::int64_t> owner_user_id;
};

// A post that survived ingestion: at least one resolved ecosystem and at
// least one code snippet.
struct SnippetPost {
    std::int64_t post_id = 0;
    std::int64_t ts_ms = 0;
    std::optional<std::int64_t> user_id;
    std::vector<std::string> langs;    // sorted, unique
    std::vector<std::string> snippets; // plain text, entity-decoded
};

// The atomic analysis record: one per (post, ecosystem) pair with a
// non-empty import set.
struct ImportEvent {
    std::string lang;
    std::int64_t post_id = 0;
    std::int64_t ts_ms = 0;
    std::optional<std::int64_t> user_id;
    std::vector<std::string> libs; // sorted, unique, normalized
};

enum class NoveltyKind { simple, pair };

struct NoveltyRecord {
    std::int64_t post_id = 0;
    std::int64_t ts_ms = 0;
    std::optional<std::int64_t> user_id;
    NoveltyKind kind = NoveltyKind::simple;
    // simple: first is the library, second empty.
    // pair: first < second lexicographically.
    std::string first;
    std::string second;
};

struct SeriesSample {
    std::int64_t posts = 0;          // cumulative qualifying posts N
    std::int64_t distinct_libs = 0;  // D(N), eligible libraries seen
    std::int64_t distinct_pairs = 0; // P(N), eligible pairs seen
};

struct PostFlags {
    std::int64_t post_id = 0;
    std::int64_t ts_ms = 0;
    std::optional<std::int64_t> user_id;
    bool has_simple = false;
    bool has_pair = false;
};

} // namespace ecolens
