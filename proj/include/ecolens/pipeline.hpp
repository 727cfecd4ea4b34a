#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecolens/ingest.hpp"
#include "ecolens/novelty.hpp"
#include "ecolens/user_analysis.hpp"

namespace ecolens::pipeline {

inline constexpr const char* kVersion = "0.1.0";

// Stage names in execution order: ingest, extract, novelty, analytics,
// users, geo, validity. geo and validity are no-ops unless their input
// files are configured.
const std::vector<std::string>& all_stages();

struct Config {
    // Inputs. Whichever later artifact is supplied short-circuits the
    // stages that would produce it.
    std::optional<std::string> posts_xml;
    std::optional<std::string> snippets_jsonl;
    std::optional<std::string> events_jsonl;

    std::string out_dir = "out";
    std::vector<std::string> ecosystems = ingest::default_ecosystems();
    ingest::TagAliasMap tag_aliases = ingest::default_alias_map(); // resolved
    int threshold = 10;
    novelty::ThresholdSemantics semantics = novelty::ThresholdSemantics::total;
    std::vector<int> adoption_thresholds = {100, 1000};
    std::vector<int> variant_years;
    std::int64_t min_posts_geo = 1000;
    std::int64_t fit_trim = 100;
    users::ExperienceSource experience_source = users::ExperienceSource::events;
    std::optional<std::string> user_countries;
    std::map<std::string, std::string> canonical_lists; // ecosystem -> file
    std::optional<std::string> grammars_path;           // replaces defaults
    std::vector<std::string> stages = all_stages();
};

Config load_config(const std::string& path);
Config config_from_json_text(const std::string& text);
std::string config_to_json_text(const Config& cfg); // resolved, canonical

// Replaces the ecosystem list, refiltering tag aliases to surviving targets
// and guaranteeing each ecosystem maps its own name.
void set_ecosystems(Config& cfg, const std::vector<std::string>& ecosystems);

// Throws on contradictions: unknown stage names, empty stage list,
// non-positive thresholds, alias targets outside the ecosystem list,
// configured input files that do not exist.
void validate_config(const Config& cfg);

struct RunOptions {
    bool resume = false; // skip stages whose outputs already exist
};

// Executes the configured stages behind file barriers and writes
// manifest.json last. A failing stage is recorded in the manifest (partial
// artifacts are kept) and its error rethrown.
void run(const Config& cfg, const RunOptions& opt = {});

} // namespace ecolens::pipeline
