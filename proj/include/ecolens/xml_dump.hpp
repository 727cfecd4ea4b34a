#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string_view>

#include "ecolens/types.hpp"

namespace ecolens::xml {

// Per-scan accounting; rows == emitted + skipped_other + skipped_malformed.
struct DumpStats {
    std::uint64_t rows = 0;
    std::uint64_t emitted = 0;
    std::uint64_t skipped_other = 0;     // PostTypeId outside {1,2}
    std::uint64_t skipped_malformed = 0; // bad id/type/date, missing parent, …
};

// Parses the attribute text of one `<row …/>` element (the part between
// "<row" and "/>"). Attribute values are entity-decoded once here. Returns
// nullopt when a required field is missing or unparseable.
std::optional<RawPost> parse_row(std::string_view attrs);

// Streams `<row …/>` elements out of a Posts-dump XML stream, quote-aware so
// '>' inside attribute values does not terminate a row. Calls `sink` for each
// retained question/answer row; everything else is counted in `stats`.
void scan_posts(std::istream& in, const std::function<void(RawPost&&)>& sink, DumpStats& stats);

} // namespace ecolens::xml
