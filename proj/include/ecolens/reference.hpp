#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ecolens/types.hpp"

// Deliberately naive serial implementations of the detection pipeline. They
// trade speed for obviousness and exist to cross-check the optimized engine
// (tests, benchmark baseline). Events are one ecosystem's ordered stream.
namespace ecolens::ref {

std::map<std::string, std::int64_t> count_frequencies(const std::vector<ImportEvent>& events);

std::set<std::string> eligibility(const std::map<std::string, std::int64_t>& counts,
                                  int threshold);

// First occurrence per library, scanning the eligibility-filtered stream.
std::vector<NoveltyRecord> simple_novelties(const std::vector<ImportEvent>& events,
                                            const std::set<std::string>& eligible);

// First co-occurrence per unordered pair, tracked in a plain ordered set.
std::vector<NoveltyRecord> pair_novelties(const std::vector<ImportEvent>& events,
                                          const std::set<std::string>& eligible);

std::vector<SeriesSample> series(const std::vector<ImportEvent>& events,
                                 const std::set<std::string>& eligible);

std::vector<PostFlags> flags(const std::vector<ImportEvent>& events,
                             const std::set<std::string>& eligible);

} // namespace ecolens::ref
