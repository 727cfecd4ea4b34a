#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecolens/types.hpp"

namespace ecolens::synth {

// Copy-or-innovate corpus generator with exact growth laws, used as a
// fitting oracle. With probability p(t) a post innovates: it mints k fresh
// libraries, contributing exactly k simple novelties and C(k,2) novel
// pairs. Otherwise it replicates the library set of a uniformly random
// earlier post, contributing none of either (the source post already
// introduced every member and every pair of its set).
//
//   constant:  p(t) = p0            -> D(N) ~ E[k] * p0 * N        (linear)
//   decaying:  p(t) = p0 * t^(b-1)  -> D(N) ~ N^b                  (Heaps)
struct SynthConfig {
    std::int64_t posts = 100000;
    std::uint64_t seed = 42;
    enum class Mode { constant, decaying } mode = Mode::constant;
    double p0 = 0.02;
    double beta = 0.6; // decaying mode exponent b
    int libs_min = 3;
    int libs_max = 3;
    std::int64_t users = 1000; // post authors assigned round-robin
    std::string lang = "synthetic";
};

SynthConfig::Mode mode_from_string(const std::string& s);
std::string to_string(SynthConfig::Mode mode);

// Deterministic for a fixed config (hand-rolled sampling; no distribution
// objects whose layout could drift between library versions).
std::vector<ImportEvent> generate(const SynthConfig& cfg);

// Ground truth the fits are compared against (constant mode; the first post
// always innovates, a vanishing edge correction).
double analytic_heaps_exponent(const SynthConfig& cfg); // 1 for constant mode
double analytic_simple_rate(const SynthConfig& cfg);    // E[k] * p0
double analytic_pair_rate(const SynthConfig& cfg);      // E[C(k,2)] * p0

} // namespace ecolens::synth
