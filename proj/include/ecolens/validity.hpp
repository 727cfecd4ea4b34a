#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ecolens/grammar.hpp"
#include "ecolens/types.hpp"

namespace ecolens::validity {

// Registry + stdlib names for one ecosystem, normalized with the same rules
// the import grammars use, so membership tests compare like with like.
struct CanonicalList {
    std::string ecosystem;
    std::unordered_set<std::string> names;
    std::int64_t dropped = 0; // lines the normalizer rejected
};

// One name per line; blank lines and '#' comments skipped.
CanonicalList load_canonical_list(const std::string& path, const std::string& ecosystem,
                                  const grammar::GrammarSet& grammars);

struct NameCheck {
    std::string name;
    std::int64_t posts = 0; // distinct posts importing it
    bool hit = false;
};

struct ValidityReport {
    std::string ecosystem;
    std::int64_t distinct = 0;
    std::int64_t hits = 0;
    std::optional<double> rate; // absent (not 0) when there are no events
    std::vector<NameCheck> table; // all distinct names, sorted
};

// fraction = distinct extracted names found in canon / distinct extracted.
// Events must all belong to the list's ecosystem.
ValidityReport validity_rate(const std::vector<ImportEvent>& events,
                             const CanonicalList& canon);

} // namespace ecolens::validity
