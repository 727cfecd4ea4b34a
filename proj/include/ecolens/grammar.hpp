#pragma once

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "ecolens/types.hpp"

namespace ecolens::grammar {

// How a captured name is reduced to a canonical library name.
struct NormRule {
    std::string separator;               // "" = keep the whole name
    int root_depth = 1;                  // segments kept after splitting
    bool scoped_npm = false;             // keep "@scope/pkg" as one name
    std::vector<std::string> strip_exts; // trailing extensions to drop
    bool lowercase = false;              // case-insensitive ecosystems only
    std::vector<std::string> exclusions; // names rejected outright
};

// One import-pattern rule. `hint` is a cheap substring prefilter: lines
// without it are never run through the regex.
struct Rule {
    std::string pattern;
    bool comma_list = false;     // capture is a comma list of names
    std::string hint;
    bool not_after_word = false; // reject matches preceded by [\w.:@]
    std::optional<NormRule> norm;

    std::regex re;        // compiled from pattern
    bool anchored = false; // derived: pattern begins with '^'
};

struct Grammar {
    std::string ecosystem;
    NormRule norm;
    std::vector<Rule> rules;
};

class GrammarSet {
public:
    // The twelve built-in ecosystem grammars.
    static GrammarSet defaults();

    // Load/replace from a JSON config (same schema as dump_json); patterns
    // are compiled eagerly so bad ones fail at load time.
    static GrammarSet from_json_text(const std::string& text);
    static GrammarSet from_json_file(const std::string& path);
    std::string dump_json() const;

    const Grammar* find(const std::string& ecosystem) const;
    std::vector<std::string> ecosystems() const;

    // Deduplicated normalized names matched anywhere in the snippet.
    std::set<std::string> extract_imports(const std::string& snippet,
                                          const std::string& ecosystem) const;

    // Normalization alone; nullopt = rejected (relative path, exclusion, …).
    std::optional<std::string> normalize(const std::string& raw,
                                         const std::string& ecosystem) const;

    // One ImportEvent per (post, language) with a non-empty import set.
    std::vector<ImportEvent> scan_post(const SnippetPost& post) const;

private:
    std::map<std::string, Grammar> grammars_;
};

// Normalization against an explicit rule (used for per-rule overrides).
std::optional<std::string> normalize_name(const std::string& raw, const NormRule& rule);

} // namespace ecolens::grammar
