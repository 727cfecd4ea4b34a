#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecolens/types.hpp"
#include "ecolens/xml_dump.hpp"

namespace ecolens::ingest {

// tag (lowercase) -> ecosystem id
using TagAliasMap = std::map<std::string, std::string>;

const std::vector<std::string>& default_ecosystems();
TagAliasMap default_alias_map();

struct IngestStats {
    xml::DumpStats dump;                 // pass-2 row accounting
    std::uint64_t questions_indexed = 0; // pass 1
    std::uint64_t orphan_answers = 0;    // parent question never seen
    std::uint64_t no_language = 0;       // no tag mapped to an ecosystem
    std::uint64_t no_snippets = 0;       // no <pre><code> block in the body
    std::uint64_t emitted = 0;           // SnippetPosts produced
};

// Effective language set of a post: own tags for questions, the parent
// question's tags for answers (orphans resolve to nothing and are counted).
// Result is sorted and unique.
std::vector<std::string> resolve_languages(
    const RawPost& post,
    const std::unordered_map<std::int64_t, std::vector<std::string>>& question_tags,
    const TagAliasMap& aliases, std::uint64_t* orphan_counter = nullptr);

// Text content of each <pre><code>…</code></pre> block, entity-decoded, in
// document order. Inline <code> spans outside <pre> are ignored. Malformed
// markup is handled by best-effort scanning.
std::vector<std::string> extract_snippets(const std::string& body_html);

// Sorts ascending by (ts, post_id).
void order_stream(std::vector<SnippetPost>& posts);

// Full two-pass ingestion of a Posts-dump XML file: pass 1 indexes question
// tags, pass 2 resolves languages and extracts snippets. Output is ordered.
std::vector<SnippetPost> ingest_dump(const std::string& xml_path, const TagAliasMap& aliases,
                                     IngestStats& stats);

// Snippet extraction over an already-parsed batch; used by ingest_dump and
// by the benchmark (parallel when built with OpenMP).
std::vector<SnippetPost> extract_batch(const std::vector<RawPost>& posts,
                                       const std::vector<std::vector<std::string>>& langs,
                                       IngestStats& stats);
std::vector<SnippetPost> extract_batch_serial(const std::vector<RawPost>& posts,
                                              const std::vector<std::vector<std::string>>& langs,
                                              IngestStats& stats);

} // namespace ecolens::ingest
