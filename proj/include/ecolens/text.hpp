#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecolens::text {

// Decodes HTML/XML character references (&lt; &gt; &amp; &quot; &apos;
// &#NN; &#xHH;). Unknown entities are passed through verbatim.
std::string decode_entities(std::string_view in);

// Parses "YYYY-MM-DDTHH:MM:SS[.fff]" as UTC and returns epoch milliseconds.
std::optional<std::int64_t> parse_timestamp_ms(std::string_view s);

// Formats epoch milliseconds back to "YYYY-MM-DDTHH:MM:SS.fff" (UTC).
std::string format_timestamp_ms(std::int64_t ms);

// Calendar year (UTC) of an epoch-millisecond timestamp.
int year_of_ms(std::int64_t ms);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Splits "<a><b><c>" or "|a|b|c|" (and plain "a|b|c") tag attribute forms
// into lowercase tag names.
std::vector<std::string> parse_tag_list(std::string_view raw);

// Fixed CSV/report float formatting: 6 significant digits.
std::string format_g6(double v);

// FNV-1a 64-bit, used for config/content digests in the manifest.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

// Digest of a file's contents; nullopt if unreadable.
std::optional<std::uint64_t> digest_file(const std::string& path);

} // namespace ecolens::text
