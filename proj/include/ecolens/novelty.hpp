#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ecolens/types.hpp"

namespace ecolens::novelty {

enum class ThresholdSemantics {
    total,     // eligible when imported by >= threshold posts corpus-wide
    subsequent // ">= threshold more posts after the first", i.e. threshold+1
};

struct EngineConfig {
    int threshold = 10;
    ThresholdSemantics semantics = ThresholdSemantics::total;
};

using CountMap = std::unordered_map<std::string, std::int64_t>;
using EligibilitySet = std::unordered_set<std::string>;

// Pass 1: number of distinct posts importing each library. Events must
// already be deduplicated per post (one event per post & ecosystem).
CountMap count_frequencies(const std::vector<ImportEvent>& events);

// threshold 1 disables filtering; threshold < 1 is a configuration error.
EligibilitySet build_eligibility(const CountMap& counts, int threshold);

int effective_threshold(const EngineConfig& cfg);

struct DetectOutput {
    std::vector<NoveltyRecord> records;
    std::vector<SeriesSample> series; // sampled once per event
};

// Pass 2, single dimension each. Events must arrive ascending by
// (ts, post_id); a regression throws. The series carries only the detector's
// own column (the other stays 0).
DetectOutput detect_novelties(const std::vector<ImportEvent>& events,
                              const EligibilitySet& eligible);
DetectOutput detect_pair_novelties(const std::vector<ImportEvent>& events,
                                   const EligibilitySet& eligible);

std::vector<PostFlags> novelty_flags_per_post(const std::vector<ImportEvent>& events,
                                              const EligibilitySet& eligible);

// Combined sequential scan for one ecosystem: both detectors plus per-post
// flags in a single pass, all sharing one (N, D, P) series.
struct EcosystemResult {
    std::string ecosystem;
    std::vector<NoveltyRecord> novelties; // per event: simples (lex), then pairs (lex)
    std::vector<SeriesSample> series;
    std::vector<PostFlags> flags;
    std::int64_t events = 0;
    std::int64_t eligible_libs = 0;
};

EcosystemResult analyze_ecosystem(const std::string& ecosystem,
                                  const std::vector<ImportEvent>& events,
                                  const EngineConfig& cfg);

// Groups a mixed-ecosystem ordered stream and analyzes every ecosystem
// (independently; in parallel when built with OpenMP). Results sorted by
// ecosystem id.
std::vector<EcosystemResult> analyze_all(const std::vector<ImportEvent>& events,
                                         const EngineConfig& cfg);

} // namespace ecolens::novelty
