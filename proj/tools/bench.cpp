// Compares the OpenMP kernels against their serial counterparts on
// generated workloads and cross-checks that both produce identical results.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ecolens/ingest.hpp"
#include "ecolens/novelty.hpp"
#include "ecolens/reference.hpp"
#include "ecolens/synth.hpp"

using namespace ecolens;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Mixed-ecosystem stream: one synthetic sub-corpus per ecosystem id,
// interleaved by timestamp.
std::vector<ImportEvent> mixed_corpus(std::int64_t posts_per_eco) {
    std::vector<ImportEvent> all;
    std::uint64_t seed = 1;
    for (const std::string& eco : ingest::default_ecosystems()) {
        synth::SynthConfig cfg;
        cfg.posts = posts_per_eco;
        cfg.seed = seed++;
        cfg.mode = synth::SynthConfig::Mode::decaying;
        cfg.p0 = 0.5;
        cfg.beta = 0.7;
        cfg.lang = eco;
        for (ImportEvent& ev : synth::generate(cfg)) {
            // spread ecosystems over distinct post ids to keep (ts, post_id)
            // ordering intact after the merge
            ev.post_id = ev.post_id * 16 + static_cast<std::int64_t>(all.size() % 16);
            all.push_back(std::move(ev));
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const ImportEvent& a, const ImportEvent& b) {
        if (a.ts_ms != b.ts_ms) return a.ts_ms < b.ts_ms;
        return a.post_id < b.post_id;
    });
    return all;
}

std::vector<RawPost> snippet_posts_workload(std::size_t n) {
    const std::string body =
        "<p>Intro text with some &lt;escaped&gt; markup.</p>"
        "<pre><code>import numpy as np\nimport pandas as pd\nfrom collections import Counter\n"
        "def f(x):\n    return np.sum(x)\n</code></pre>"
        "<p>More prose.</p>"
        "<pre><code>import requests\nr = requests.get(url)\nprint(r.status_code)\n</code></pre>";
    std::vector<RawPost> posts(n);
    for (std::size_t i = 0; i < n; ++i) {
        posts[i].id = static_cast<std::int64_t>(i + 1);
        posts[i].type = PostType::question;
        posts[i].creation_ts_ms = 1199145600000 + static_cast<std::int64_t>(i) * 1000;
        posts[i].tags = {"python"};
        posts[i].body_html = body;
        posts[i].owner_user_id = static_cast<std::int64_t>(i % 97);
    }
    return posts;
}

bool same_novelties(const std::vector<NoveltyRecord>& a, const std::vector<NoveltyRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].post_id != b[i].post_id || a[i].kind != b[i].kind ||
            a[i].first != b[i].first || a[i].second != b[i].second) {
            return false;
        }
    }
    return true;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel paths fall back to serial\n\n");
#endif

    {
        const std::vector<RawPost> posts = snippet_posts_workload(20000);
        const std::vector<std::vector<std::string>> langs(posts.size(), {"python"});

        ingest::IngestStats s1, s2;
        auto t0 = Clock::now();
        const std::vector<SnippetPost> serial = ingest::extract_batch_serial(posts, langs, s1);
        const double t_serial = ms_since(t0);
        t0 = Clock::now();
        const std::vector<SnippetPost> parallel = ingest::extract_batch(posts, langs, s2);
        const double t_parallel = ms_since(t0);

        bool ok = serial.size() == parallel.size();
        for (std::size_t i = 0; ok && i < serial.size(); ++i) {
            ok = serial[i].post_id == parallel[i].post_id &&
                 serial[i].snippets == parallel[i].snippets;
        }
        std::printf("snippet extraction  %6zu posts   serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
                    posts.size(), t_serial, t_parallel, t_serial / t_parallel,
                    ok ? "results match" : "MISMATCH");
    }

    {
        const std::vector<ImportEvent> events = mixed_corpus(20000);
        novelty::EngineConfig cfg;
        cfg.threshold = 3;

        std::map<std::string, std::vector<ImportEvent>> by_lang;
        for (const ImportEvent& ev : events) by_lang[ev.lang].push_back(ev);

        auto t0 = Clock::now();
        std::vector<novelty::EcosystemResult> serial;
        for (const auto& [eco, evs] : by_lang) {
            serial.push_back(novelty::analyze_ecosystem(eco, evs, cfg));
        }
        const double t_serial = ms_since(t0);

        t0 = Clock::now();
        const std::vector<novelty::EcosystemResult> parallel = novelty::analyze_all(events, cfg);
        const double t_parallel = ms_since(t0);

        bool ok = serial.size() == parallel.size();
        for (std::size_t i = 0; ok && i < serial.size(); ++i) {
            ok = serial[i].ecosystem == parallel[i].ecosystem &&
                 same_novelties(serial[i].novelties, parallel[i].novelties);
        }
        std::printf("novelty engine      %6zu events  serial %8.1f ms   parallel %8.1f ms   x%.2f   %s\n",
                    events.size(), t_serial, t_parallel, t_serial / t_parallel,
                    ok ? "results match" : "MISMATCH");
    }

    {
        // engine vs brute-force reference on one ecosystem
        synth::SynthConfig cfg;
        cfg.posts = 30000;
        cfg.seed = 99;
        cfg.mode = synth::SynthConfig::Mode::decaying;
        cfg.p0 = 0.5;
        cfg.beta = 0.7;
        const std::vector<ImportEvent> events = synth::generate(cfg);
        novelty::EngineConfig ec;
        ec.threshold = 3;

        auto t0 = Clock::now();
        const novelty::EcosystemResult fast = novelty::analyze_ecosystem(cfg.lang, events, ec);
        const double t_fast = ms_since(t0);

        t0 = Clock::now();
        const auto counts = ref::count_frequencies(events);
        const auto eligible = ref::eligibility(counts, ec.threshold);
        std::vector<NoveltyRecord> slow = ref::simple_novelties(events, eligible);
        const std::vector<NoveltyRecord> pairs = ref::pair_novelties(events, eligible);
        const double t_slow = ms_since(t0);

        std::size_t fast_simple = 0, fast_pair = 0;
        for (const NoveltyRecord& r : fast.novelties) {
            (r.kind == NoveltyKind::pair ? fast_pair : fast_simple)++;
        }
        const bool ok = fast_simple == slow.size() && fast_pair == pairs.size();
        std::printf("engine vs reference %6zu events  engine %8.1f ms   reference %7.1f ms   x%.2f   %s\n",
                    events.size(), t_fast, t_slow, t_slow / t_fast,
                    ok ? "results match" : "MISMATCH");
    }

    return 0;
}
