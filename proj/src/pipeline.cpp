#include "ecolens/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ecolens/analytics.hpp"
#include "ecolens/geo.hpp"
#include "ecolens/grammar.hpp"
#include "ecolens/io.hpp"
#include "ecolens/svg.hpp"
#include "ecolens/text.hpp"
#include "ecolens/validity.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ecolens::pipeline {

const std::vector<std::string>& all_stages() {
    static const std::vector<std::string> kStages = {
        "ingest", "extract", "novelty", "analytics", "users", "geo", "validity"};
    return kStages;
}

// --- config ---

namespace {

novelty::ThresholdSemantics semantics_from_string(const std::string& s) {
    if (s == "total") return novelty::ThresholdSemantics::total;
    if (s == "subsequent") return novelty::ThresholdSemantics::subsequent;
    throw std::invalid_argument("unknown threshold_semantics: " + s);
}

std::string semantics_to_string(novelty::ThresholdSemantics s) {
    return s == novelty::ThresholdSemantics::total ? "total" : "subsequent";
}

const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> kKeys = {
        "input",           "out_dir",       "ecosystems",        "tag_aliases",
        "threshold",       "threshold_semantics", "adoption_thresholds", "variant_years",
        "min_posts_geo",   "fit_trim",      "experience_source", "user_countries",
        "canonical_lists", "grammars",      "stages"};
    return kKeys;
}

} // namespace

Config config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config root must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known_config_keys().count(key)) {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    Config cfg;
    if (j.contains("input")) {
        const json& in = j.at("input");
        if (in.contains("posts_xml")) cfg.posts_xml = in.at("posts_xml").get<std::string>();
        if (in.contains("snippets_jsonl")) cfg.snippets_jsonl = in.at("snippets_jsonl").get<std::string>();
        if (in.contains("events_jsonl")) cfg.events_jsonl = in.at("events_jsonl").get<std::string>();
    }
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("ecosystems")) {
        set_ecosystems(cfg, j.at("ecosystems").get<std::vector<std::string>>());
    }
    if (j.contains("tag_aliases")) {
        for (const auto& [tag, eco] : j.at("tag_aliases").items()) {
            cfg.tag_aliases[text::to_lower(tag)] = eco.get<std::string>();
        }
    }
    if (j.contains("threshold")) cfg.threshold = j.at("threshold").get<int>();
    if (j.contains("threshold_semantics")) {
        cfg.semantics = semantics_from_string(j.at("threshold_semantics").get<std::string>());
    }
    if (j.contains("adoption_thresholds")) {
        cfg.adoption_thresholds = j.at("adoption_thresholds").get<std::vector<int>>();
    }
    if (j.contains("variant_years")) {
        cfg.variant_years = j.at("variant_years").get<std::vector<int>>();
    }
    if (j.contains("min_posts_geo")) cfg.min_posts_geo = j.at("min_posts_geo").get<std::int64_t>();
    if (j.contains("fit_trim")) cfg.fit_trim = j.at("fit_trim").get<std::int64_t>();
    if (j.contains("experience_source")) {
        cfg.experience_source =
            users::experience_source_from_string(j.at("experience_source").get<std::string>());
    }
    if (j.contains("user_countries")) cfg.user_countries = j.at("user_countries").get<std::string>();
    if (j.contains("canonical_lists")) {
        for (const auto& [eco, path] : j.at("canonical_lists").items()) {
            cfg.canonical_lists[eco] = path.get<std::string>();
        }
    }
    if (j.contains("grammars")) cfg.grammars_path = j.at("grammars").get<std::string>();
    if (j.contains("stages")) cfg.stages = j.at("stages").get<std::vector<std::string>>();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const Config& cfg) {
    json j;
    json in = json::object();
    if (cfg.posts_xml) in["posts_xml"] = *cfg.posts_xml;
    if (cfg.snippets_jsonl) in["snippets_jsonl"] = *cfg.snippets_jsonl;
    if (cfg.events_jsonl) in["events_jsonl"] = *cfg.events_jsonl;
    j["input"] = in;
    j["out_dir"] = cfg.out_dir;
    j["ecosystems"] = cfg.ecosystems;
    j["tag_aliases"] = cfg.tag_aliases;
    j["threshold"] = cfg.threshold;
    j["threshold_semantics"] = semantics_to_string(cfg.semantics);
    j["adoption_thresholds"] = cfg.adoption_thresholds;
    j["variant_years"] = cfg.variant_years;
    j["min_posts_geo"] = cfg.min_posts_geo;
    j["fit_trim"] = cfg.fit_trim;
    j["experience_source"] = users::to_string(cfg.experience_source);
    if (cfg.user_countries) j["user_countries"] = *cfg.user_countries;
    j["canonical_lists"] = cfg.canonical_lists;
    if (cfg.grammars_path) j["grammars"] = *cfg.grammars_path;
    j["stages"] = cfg.stages;
    return j.dump(2) + "\n";
}

void set_ecosystems(Config& cfg, const std::vector<std::string>& ecosystems) {
    if (ecosystems.empty()) throw std::invalid_argument("ecosystem list is empty");
    cfg.ecosystems = ecosystems;
    const std::set<std::string> keep(ecosystems.begin(), ecosystems.end());
    ingest::TagAliasMap filtered;
    for (const auto& [tag, eco] : cfg.tag_aliases) {
        if (keep.count(eco)) filtered[tag] = eco;
    }
    for (const std::string& eco : ecosystems) filtered.emplace(eco, eco);
    cfg.tag_aliases = std::move(filtered);
}

void validate_config(const Config& cfg) {
    if (cfg.stages.empty()) throw std::invalid_argument("no stages enabled");
    std::set<std::string> seen;
    const auto& known = all_stages();
    for (const std::string& s : cfg.stages) {
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            throw std::invalid_argument("unknown stage: " + s);
        }
        if (!seen.insert(s).second) throw std::invalid_argument("duplicate stage: " + s);
    }
    if (cfg.threshold < 1) throw std::invalid_argument("threshold must be >= 1");
    for (int t : cfg.adoption_thresholds) {
        if (t < 1) throw std::invalid_argument("adoption threshold must be >= 1");
    }
    if (cfg.min_posts_geo < 1) throw std::invalid_argument("min_posts_geo must be >= 1");
    if (cfg.fit_trim < 0) throw std::invalid_argument("fit_trim must be >= 0");
    if (cfg.ecosystems.empty()) throw std::invalid_argument("ecosystem list is empty");
    std::set<std::string> ecos(cfg.ecosystems.begin(), cfg.ecosystems.end());
    if (ecos.size() != cfg.ecosystems.size()) {
        throw std::invalid_argument("duplicate ecosystem in list");
    }
    for (const auto& [tag, eco] : cfg.tag_aliases) {
        if (!ecos.count(eco)) {
            throw std::invalid_argument("tag alias '" + tag + "' targets unknown ecosystem '" +
                                        eco + "'");
        }
    }
    auto must_exist = [](const std::optional<std::string>& p, const char* what) {
        if (p && !fs::exists(*p)) {
            throw std::invalid_argument(std::string(what) + " does not exist: " + *p);
        }
    };
    must_exist(cfg.posts_xml, "input.posts_xml");
    must_exist(cfg.snippets_jsonl, "input.snippets_jsonl");
    must_exist(cfg.events_jsonl, "input.events_jsonl");
    must_exist(cfg.user_countries, "user_countries");
    must_exist(cfg.grammars_path, "grammars");
    for (const auto& [eco, path] : cfg.canonical_lists) {
        if (!fs::exists(path)) {
            throw std::invalid_argument("canonical list for " + eco + " does not exist: " + path);
        }
    }
}

// --- run ---

namespace {

struct StageRecord {
    std::string name;
    std::string status = "ok"; // ok | skipped | failed
    std::string note;
    std::map<std::string, std::int64_t> counts;
};

struct Ctx {
    const Config& cfg;
    RunOptions opt;
    std::string snippets_path;
    std::string events_path;
    std::vector<StageRecord> records;
    std::map<std::string, std::string> outputs; // out_dir-relative -> digest

    // lazily shared between stages run in the same process
    std::optional<std::vector<ImportEvent>> events;
    std::optional<std::vector<io::FlagRow>> flags;
    std::optional<std::vector<novelty::EcosystemResult>> results;
};

std::string out_path(const Ctx& ctx, const std::string& name) {
    return (fs::path(ctx.cfg.out_dir) / name).string();
}

void note_output(Ctx& ctx, const std::string& path) {
    const auto digest = text::digest_file(path);
    const std::string rel = fs::path(path).filename().string();
    ctx.outputs[rel] = digest ? text::hex64(*digest) : "unreadable";
}

bool enabled(const Ctx& ctx, const std::string& stage) {
    return std::find(ctx.cfg.stages.begin(), ctx.cfg.stages.end(), stage) !=
           ctx.cfg.stages.end();
}

// Files a stage is known to produce: fixed names plus prefix families.
void stage_patterns(const std::string& stage, std::vector<std::string>& names,
                    std::vector<std::string>& prefixes) {
    if (stage == "ingest") names = {"snippets.jsonl"};
    if (stage == "extract") names = {"events.jsonl"};
    if (stage == "novelty") names = {"novelties.csv", "series.csv", "flags.csv"};
    if (stage == "analytics") {
        names = {"fits.csv", "table1.csv", "fig1.svg", "fig3.svg"};
        prefixes = {"pareto_"};
    }
    if (stage == "users") {
        names = {"user_bins.csv", "fig4.svg"};
        prefixes = {"user_bins_"};
    }
    if (stage == "geo") names = {"geo_rates.csv", "fig5.svg"};
    if (stage == "validity") prefixes = {"validity_misses_"};
}

// Resume: a stage is considered done when its fixed-name outputs exist.
bool resume_outputs_present(const Ctx& ctx, const std::string& stage) {
    std::vector<std::string> names, prefixes;
    stage_patterns(stage, names, prefixes);
    if (stage == "ingest") return fs::exists(ctx.snippets_path);
    if (stage == "extract") return fs::exists(ctx.events_path);
    if (stage == "geo") return fs::exists(out_path(ctx, "geo_rates.csv"));
    if (stage == "validity") {
        if (ctx.cfg.canonical_lists.empty()) return false;
        for (const auto& [eco, path] : ctx.cfg.canonical_lists) {
            (void)path;
            if (!fs::exists(out_path(ctx, "validity_misses_" + eco + ".csv"))) return false;
        }
        return true;
    }
    if (names.empty()) return false;
    for (const std::string& n : names) {
        if (!fs::exists(out_path(ctx, n))) return false;
    }
    return true;
}

// On a resume-skip, fold the pre-existing outputs into the manifest.
void record_existing_outputs(Ctx& ctx, const std::string& stage) {
    std::vector<std::string> names, prefixes;
    stage_patterns(stage, names, prefixes);
    std::vector<std::string> found;
    for (const std::string& n : names) {
        const std::string p = out_path(ctx, n);
        if (fs::exists(p)) found.push_back(p);
    }
    if (!prefixes.empty() && fs::exists(ctx.cfg.out_dir)) {
        for (const auto& entry : fs::directory_iterator(ctx.cfg.out_dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            for (const std::string& pre : prefixes) {
                if (name.rfind(pre, 0) == 0) found.push_back(entry.path().string());
            }
        }
    }
    std::sort(found.begin(), found.end());
    for (const std::string& p : found) note_output(ctx, p);
}

const std::vector<ImportEvent>& get_events(Ctx& ctx) {
    if (!ctx.events) {
        if (!fs::exists(ctx.events_path)) {
            throw std::runtime_error("events input missing: " + ctx.events_path +
                                     " (run the extract stage or configure input.events_jsonl)");
        }
        ctx.events = io::read_events(ctx.events_path);
        for (std::size_t i = 1; i < ctx.events->size(); ++i) {
            const ImportEvent& a = (*ctx.events)[i - 1];
            const ImportEvent& b = (*ctx.events)[i];
            if (b.ts_ms < a.ts_ms || (b.ts_ms == a.ts_ms && b.post_id < a.post_id)) {
                throw std::runtime_error("event stream is not ordered by (ts, post_id) at post " +
                                         std::to_string(b.post_id));
            }
        }
    }
    return *ctx.events;
}

const std::vector<io::FlagRow>& get_flags(Ctx& ctx) {
    if (!ctx.flags) {
        const std::string path = out_path(ctx, "flags.csv");
        if (!fs::exists(path)) {
            throw std::runtime_error("flags.csv missing; run the novelty stage first");
        }
        ctx.flags = io::read_flags_csv(path);
    }
    return *ctx.flags;
}

std::map<std::string, std::vector<SeriesSample>> read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::map<std::string, std::vector<SeriesSample>> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue; // header
        }
        const std::vector<std::string> f = io::csv_split(line);
        if (f.size() != 4) throw std::runtime_error("bad series row: " + line);
        out[f[0]].push_back({std::stoll(f[1]), std::stoll(f[2]), std::stoll(f[3])});
    }
    return out;
}

std::vector<std::pair<double, double>> thin(const std::vector<std::pair<double, double>>& pts,
                                            std::size_t cap = 512) {
    if (pts.size() <= cap) return pts;
    std::vector<std::pair<double, double>> out;
    const std::size_t stride = (pts.size() + cap - 1) / cap;
    for (std::size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
    if (out.back() != pts.back()) out.push_back(pts.back());
    return out;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? text::format_g6(*v) : std::string();
}

std::string fmt_user(const std::optional<std::int64_t>& u) {
    return u ? std::to_string(*u) : std::string();
}

// --- stages ---

void stage_ingest(Ctx& ctx, StageRecord& rec) {
    if (ctx.cfg.events_jsonl) {
        rec.status = "skipped";
        rec.note = "events supplied as input";
        return;
    }
    if (ctx.cfg.snippets_jsonl) {
        rec.status = "skipped";
        rec.note = "snippets supplied as input";
        return;
    }
    if (!ctx.cfg.posts_xml) {
        throw std::runtime_error("ingest needs input.posts_xml (or supply snippets/events)");
    }
    ingest::IngestStats stats;
    std::vector<SnippetPost> posts =
        ingest::ingest_dump(*ctx.cfg.posts_xml, ctx.cfg.tag_aliases, stats);
    io::write_snippet_posts(ctx.snippets_path, posts);
    note_output(ctx, ctx.snippets_path);
    rec.counts["rows"] = static_cast<std::int64_t>(stats.dump.rows);
    rec.counts["questions_indexed"] = static_cast<std::int64_t>(stats.questions_indexed);
    rec.counts["orphan_answers"] = static_cast<std::int64_t>(stats.orphan_answers);
    rec.counts["no_language"] = static_cast<std::int64_t>(stats.no_language);
    rec.counts["no_snippets"] = static_cast<std::int64_t>(stats.no_snippets);
    rec.counts["snippet_posts"] = static_cast<std::int64_t>(stats.emitted);
}

void stage_extract(Ctx& ctx, StageRecord& rec) {
    if (ctx.cfg.events_jsonl) {
        rec.status = "skipped";
        rec.note = "events supplied as input";
        return;
    }
    if (!fs::exists(ctx.snippets_path)) {
        throw std::runtime_error("snippets input missing: " + ctx.snippets_path +
                                 " (run the ingest stage or configure input.snippets_jsonl)");
    }
    const std::vector<SnippetPost> posts = io::read_snippet_posts(ctx.snippets_path);
    const grammar::GrammarSet grams = ctx.cfg.grammars_path
                                          ? grammar::GrammarSet::from_json_file(*ctx.cfg.grammars_path)
                                          : grammar::GrammarSet::defaults();
    const std::set<std::string> wanted(ctx.cfg.ecosystems.begin(), ctx.cfg.ecosystems.end());
    std::vector<std::vector<ImportEvent>> slots(posts.size());
    const std::int64_t n = static_cast<std::int64_t>(posts.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<ImportEvent> evs = grams.scan_post(posts[static_cast<std::size_t>(i)]);
        evs.erase(std::remove_if(evs.begin(), evs.end(),
                                 [&](const ImportEvent& e) { return !wanted.count(e.lang); }),
                  evs.end());
        slots[static_cast<std::size_t>(i)] = std::move(evs);
    }
    std::vector<ImportEvent> events;
    for (std::vector<ImportEvent>& s : slots) {
        for (ImportEvent& e : s) events.push_back(std::move(e));
    }
    std::stable_sort(events.begin(), events.end(), [](const ImportEvent& a, const ImportEvent& b) {
        if (a.ts_ms != b.ts_ms) return a.ts_ms < b.ts_ms;
        return a.post_id < b.post_id;
    });
    io::write_events(ctx.events_path, events);
    note_output(ctx, ctx.events_path);
    rec.counts["snippet_posts"] = n;
    rec.counts["events"] = static_cast<std::int64_t>(events.size());
    ctx.events = std::move(events);
}

void stage_novelty(Ctx& ctx, StageRecord& rec) {
    const std::vector<ImportEvent>& events = get_events(ctx);
    novelty::EngineConfig ec;
    ec.threshold = ctx.cfg.threshold;
    ec.semantics = ctx.cfg.semantics;
    std::vector<novelty::EcosystemResult> results = novelty::analyze_all(events, ec);

    std::int64_t simple = 0, pairs = 0;
    {
        io::AtomicFile f(out_path(ctx, "novelties.csv"));
        io::csv_row(f.stream(), {"ecosystem", "kind", "payload", "post_id", "ts", "user_id"});
        for (const novelty::EcosystemResult& r : results) {
            for (const NoveltyRecord& nr : r.novelties) {
                const bool is_pair = nr.kind == NoveltyKind::pair;
                (is_pair ? pairs : simple)++;
                io::csv_row(f.stream(),
                            {r.ecosystem, is_pair ? "pair" : "simple",
                             is_pair ? nr.first + "|" + nr.second : nr.first,
                             std::to_string(nr.post_id), std::to_string(nr.ts_ms),
                             fmt_user(nr.user_id)});
            }
        }
        f.commit();
    }
    note_output(ctx, out_path(ctx, "novelties.csv"));

    {
        io::AtomicFile f(out_path(ctx, "series.csv"));
        io::csv_row(f.stream(), {"ecosystem", "N", "D", "P"});
        for (const novelty::EcosystemResult& r : results) {
            for (const SeriesSample& s : r.series) {
                io::csv_row(f.stream(), {r.ecosystem, std::to_string(s.posts),
                                         std::to_string(s.distinct_libs),
                                         std::to_string(s.distinct_pairs)});
            }
        }
        f.commit();
    }
    note_output(ctx, out_path(ctx, "series.csv"));

    std::vector<io::FlagRow> flags;
    for (const novelty::EcosystemResult& r : results) {
        for (const PostFlags& pf : r.flags) flags.push_back({r.ecosystem, pf});
    }
    io::write_flags_csv(out_path(ctx, "flags.csv"), flags);
    note_output(ctx, out_path(ctx, "flags.csv"));

    rec.counts["events"] = static_cast<std::int64_t>(events.size());
    rec.counts["ecosystems"] = static_cast<std::int64_t>(results.size());
    rec.counts["simple_novelties"] = simple;
    rec.counts["pair_novelties"] = pairs;
    ctx.flags = std::move(flags);
    ctx.results = std::move(results);
}

void stage_analytics(Ctx& ctx, StageRecord& rec) {
    const std::vector<ImportEvent>& events = get_events(ctx);

    // distinct-post counts per ecosystem in one pass (libs are per-post unique)
    std::map<std::string, novelty::CountMap> counts;
    for (const ImportEvent& ev : events) {
        novelty::CountMap& c = counts[ev.lang];
        for (const std::string& lib : ev.libs) ++c[lib];
    }

    std::map<std::string, std::vector<SeriesSample>> series;
    if (ctx.results) {
        for (const novelty::EcosystemResult& r : *ctx.results) series[r.ecosystem] = r.series;
    } else {
        series = read_series_csv(out_path(ctx, "series.csv"));
    }

    const analytics::FitOptions fo{ctx.cfg.fit_trim};
    std::int64_t refused = 0;

    struct EcoOut {
        std::optional<analytics::GrowthFit> heaps;
        std::optional<analytics::GrowthFit> linear;
        analytics::ConcentrationTable conc;
        std::int64_t libraries = 0;
        std::int64_t imports = 0;
        std::int64_t novel_libs = 0;
        std::int64_t novel_pairs = 0;
    };
    std::map<std::string, EcoOut> out;
    for (const auto& [eco, cmap] : counts) {
        EcoOut& e = out[eco];
        e.libraries = static_cast<std::int64_t>(cmap.size());
        for (const auto& [lib, c] : cmap) {
            (void)lib;
            e.imports += c;
        }
        e.conc = analytics::pareto_curve(eco, cmap);
        auto it = series.find(eco);
        if (it != series.end() && !it->second.empty()) {
            e.novel_libs = it->second.back().distinct_libs;
            e.novel_pairs = it->second.back().distinct_pairs;
            try {
                e.heaps = analytics::fit_heaps(it->second, fo);
                e.heaps->ecosystem = eco;
            } catch (const std::runtime_error&) {
                ++refused;
            }
            try {
                e.linear = analytics::fit_linear(it->second, fo);
                e.linear->ecosystem = eco;
            } catch (const std::runtime_error&) {
                ++refused;
            }
        }
    }

    {
        io::AtomicFile f(out_path(ctx, "fits.csv"));
        io::csv_row(f.stream(), {"ecosystem", "kind", "exponent", "prefactor", "slope",
                                 "intercept", "r_squared", "n_min", "n_max", "points"});
        for (const auto& [eco, e] : out) {
            if (e.heaps) {
                io::csv_row(f.stream(),
                            {eco, "heaps", text::format_g6(e.heaps->exponent),
                             text::format_g6(e.heaps->prefactor), "", "",
                             text::format_g6(e.heaps->r_squared), text::format_g6(e.heaps->n_min),
                             text::format_g6(e.heaps->n_max), std::to_string(e.heaps->points)});
            }
            if (e.linear) {
                io::csv_row(f.stream(),
                            {eco, "linear", "", "", text::format_g6(e.linear->slope),
                             text::format_g6(e.linear->intercept),
                             text::format_g6(e.linear->r_squared), text::format_g6(e.linear->n_min),
                             text::format_g6(e.linear->n_max), std::to_string(e.linear->points)});
            }
        }
        f.commit();
    }
    note_output(ctx, out_path(ctx, "fits.csv"));

    for (const auto& [eco, e] : out) {
        const std::string path = out_path(ctx, "pareto_" + eco + ".csv");
        io::AtomicFile f(path);
        io::csv_row(f.stream(), {"top_fraction", "import_share"});
        for (const analytics::ParetoPoint& p : e.conc.curve) {
            io::csv_row(f.stream(), {text::format_g6(p.top_fraction),
                                     text::format_g6(p.import_share)});
        }
        f.commit();
        note_output(ctx, path);
    }

    {
        io::AtomicFile f(out_path(ctx, "table1.csv"));
        io::csv_row(f.stream(),
                    {"ecosystem", "libraries", "imports", "novel_libs", "novel_pairs", "share50",
                     "share80", "share90", "heaps_beta", "heaps_r2", "pair_slope", "pair_r2"});
        for (const auto& [eco, e] : out) {
            io::csv_row(f.stream(),
                        {eco, std::to_string(e.libraries), std::to_string(e.imports),
                         std::to_string(e.novel_libs), std::to_string(e.novel_pairs),
                         text::format_g6(e.conc.share50), text::format_g6(e.conc.share80),
                         text::format_g6(e.conc.share90),
                         fmt_opt(e.heaps ? std::optional<double>(e.heaps->exponent) : std::nullopt),
                         fmt_opt(e.heaps ? std::optional<double>(e.heaps->r_squared) : std::nullopt),
                         fmt_opt(e.linear ? std::optional<double>(e.linear->slope) : std::nullopt),
                         fmt_opt(e.linear ? std::optional<double>(e.linear->r_squared)
                                          : std::nullopt)});
        }
        f.commit();
    }
    note_output(ctx, out_path(ctx, "table1.csv"));

    {
        std::vector<svg::Series> dseries, pseries;
        for (const auto& [eco, s] : series) {
            svg::Series d{eco, {}}, p{eco, {}};
            for (const SeriesSample& x : s) {
                d.points.push_back({static_cast<double>(x.posts),
                                    static_cast<double>(x.distinct_libs)});
                p.points.push_back({static_cast<double>(x.posts),
                                    static_cast<double>(x.distinct_pairs)});
            }
            d.points = thin(d.points);
            p.points = thin(p.points);
            dseries.push_back(std::move(d));
            pseries.push_back(std::move(p));
        }
        svg::Axes da;
        da.title = "Distinct eligible libraries";
        da.x_label = "posts N";
        da.y_label = "D(N)";
        da.log_x = true;
        da.log_y = true;
        svg::Axes pa;
        pa.title = "Distinct eligible pairs";
        pa.x_label = "posts N";
        pa.y_label = "P(N)";
        io::AtomicFile f(out_path(ctx, "fig1.svg"));
        f.stream() << svg::hstack({svg::line_chart(dseries, da), svg::line_chart(pseries, pa)});
        f.commit();
    }
    note_output(ctx, out_path(ctx, "fig1.svg"));

    {
        std::vector<svg::Series> curves;
        for (const auto& [eco, e] : out) {
            svg::Series s{eco, {}};
            for (const analytics::ParetoPoint& p : e.conc.curve) {
                s.points.push_back({p.top_fraction, p.import_share});
            }
            s.points = thin(s.points);
            curves.push_back(std::move(s));
        }
        svg::Axes a;
        a.title = "Import concentration";
        a.x_label = "top fraction of libraries";
        a.y_label = "cumulative import share";
        a.diagonal = true;
        io::AtomicFile f(out_path(ctx, "fig3.svg"));
        f.stream() << svg::line_chart(curves, a);
        f.commit();
    }
    note_output(ctx, out_path(ctx, "fig3.svg"));

    rec.counts["ecosystems"] = static_cast<std::int64_t>(out.size());
    rec.counts["fits_refused"] = refused;
}

void write_user_bins_csv(Ctx& ctx, const std::string& name,
                         const std::vector<users::BinRateRow>& rows) {
    io::AtomicFile f(out_path(ctx, name));
    io::csv_row(f.stream(), {"ecosystem", "bin", "label", "posts", "simple_rate", "pair_rate"});
    for (const users::BinRateRow& r : rows) {
        io::csv_row(f.stream(), {r.ecosystem, std::to_string(r.bin), r.label,
                                 std::to_string(r.posts), fmt_opt(r.simple_rate),
                                 fmt_opt(r.pair_rate)});
    }
    f.commit();
    note_output(ctx, out_path(ctx, name));
}

void stage_users(Ctx& ctx, StageRecord& rec) {
    const std::vector<io::FlagRow>& flags = get_flags(ctx);

    users::ExperienceTable exp;
    if (ctx.cfg.experience_source == users::ExperienceSource::events) {
        exp = users::experience_from_events(get_events(ctx));
    } else {
        if (!fs::exists(ctx.snippets_path)) {
            throw std::runtime_error("experience_source=snippet_posts needs " + ctx.snippets_path);
        }
        exp = users::experience_from_posts(io::read_snippet_posts(ctx.snippets_path));
    }

    users::JoinStats stats;
    const std::vector<users::JoinedRow> joined =
        users::join_flags(flags, exp, std::nullopt, &stats);
    const std::vector<users::BinRateRow> base = users::novelty_rate_by_bin(joined);
    write_user_bins_csv(ctx, "user_bins.csv", base);

    std::set<std::string> langs;
    for (const users::BinRateRow& r : base) {
        if (r.ecosystem != "pooled") langs.insert(r.ecosystem);
    }
    for (const std::string& lang : langs) {
        std::vector<users::BinRateRow> rows;
        for (const users::BinRateRow& r : base) {
            if (r.ecosystem == lang) rows.push_back(r);
        }
        write_user_bins_csv(ctx, "user_bins_" + lang + ".csv", rows);
    }

    {
        std::vector<svg::BarGroup> groups;
        for (const users::BinRateRow& r : base) {
            if (r.ecosystem != "pooled") continue;
            groups.push_back({r.label, {r.simple_rate.value_or(0.0), r.pair_rate.value_or(0.0)}});
        }
        svg::Axes a;
        a.title = "Novelty rate by prior posts (pooled)";
        a.x_label = "prior posts in ecosystem";
        a.y_label = "share of posts with a novelty";
        io::AtomicFile f(out_path(ctx, "fig4.svg"));
        f.stream() << svg::bar_chart({"simple", "pair"}, groups, a);
        f.commit();
    }
    note_output(ctx, out_path(ctx, "fig4.svg"));

    std::vector<users::VariantSpec> variants;
    for (int t : ctx.cfg.adoption_thresholds) {
        variants.push_back({t, ctx.cfg.semantics, std::nullopt});
    }
    for (int y : ctx.cfg.variant_years) {
        variants.push_back({ctx.cfg.threshold, ctx.cfg.semantics, y});
    }
    for (const users::VariantSpec& spec : variants) {
        const users::VariantTable table =
            users::robustness_variant(get_events(ctx), exp, spec);
        write_user_bins_csv(ctx, "user_bins_" + table.name + ".csv", table.rows);
        rec.counts["variant_" + table.name + "_analyzed"] = table.stats.analyzed;
    }

    rec.counts["analyzed"] = stats.analyzed;
    rec.counts["anonymous"] = stats.anonymous;
    rec.counts["variants"] = static_cast<std::int64_t>(variants.size());
}

void stage_geo(Ctx& ctx, StageRecord& rec) {
    if (!ctx.cfg.user_countries) {
        rec.status = "skipped";
        rec.note = "no user-country mapping configured";
        return;
    }
    geo::LoadStats ls;
    const geo::UserCountryMap map = geo::load_user_countries(*ctx.cfg.user_countries, &ls);
    const geo::GeoResult res =
        geo::country_novelty_rates(get_flags(ctx), map, ctx.cfg.min_posts_geo);

    {
        io::AtomicFile f(out_path(ctx, "geo_rates.csv"));
        io::csv_row(f.stream(), {"country", "posts", "simple_rate", "pair_rate"});
        for (const geo::CountryRow& r : res.rows) {
            io::csv_row(f.stream(), {r.country, std::to_string(r.posts),
                                     text::format_g6(r.simple_rate),
                                     text::format_g6(r.pair_rate)});
        }
        f.commit();
    }
    note_output(ctx, out_path(ctx, "geo_rates.csv"));

    if (res.rows.size() > 1) {
        std::vector<svg::DotRow> simple, pair;
        for (const geo::CountryRow& r : res.rows) {
            if (r.country == "ALL") continue;
            simple.push_back({r.country, r.simple_rate});
            pair.push_back({r.country, r.pair_rate});
        }
        svg::Axes sa;
        sa.title = "Simple novelty rate by country";
        sa.x_label = "share of posts";
        svg::Axes pa;
        pa.title = "Pair novelty rate by country";
        pa.x_label = "share of posts";
        io::AtomicFile f(out_path(ctx, "fig5.svg"));
        f.stream() << svg::hstack({svg::dot_chart(simple, res.rows[0].simple_rate, sa),
                                   svg::dot_chart(pair, res.rows[0].pair_rate, pa)});
        f.commit();
        note_output(ctx, out_path(ctx, "fig5.svg"));
    } else {
        rec.note = "no country met min_posts; dot plot omitted";
    }

    rec.counts["users_loaded"] = ls.loaded;
    rec.counts["invalid_codes"] = ls.invalid_code;
    rec.counts["mapped"] = res.mapped;
    rec.counts["unmapped"] = res.unmapped;
    rec.counts["anonymous"] = res.anonymous;
    rec.counts["suppressed"] = res.suppressed;
    rec.counts["countries"] =
        res.rows.empty() ? 0 : static_cast<std::int64_t>(res.rows.size()) - 1;
}

void stage_validity(Ctx& ctx, StageRecord& rec) {
    if (ctx.cfg.canonical_lists.empty()) {
        rec.status = "skipped";
        rec.note = "no canonical lists configured";
        return;
    }
    const grammar::GrammarSet grams = ctx.cfg.grammars_path
                                          ? grammar::GrammarSet::from_json_file(*ctx.cfg.grammars_path)
                                          : grammar::GrammarSet::defaults();
    const std::vector<ImportEvent>& events = get_events(ctx);
    std::string notes;
    for (const auto& [eco, path] : ctx.cfg.canonical_lists) {
        const validity::CanonicalList canon = validity::load_canonical_list(path, eco, grams);
        std::vector<ImportEvent> mine;
        for (const ImportEvent& ev : events) {
            if (ev.lang == eco) mine.push_back(ev);
        }
        const validity::ValidityReport report = validity::validity_rate(mine, canon);
        const std::string out = out_path(ctx, "validity_misses_" + eco + ".csv");
        io::AtomicFile f(out);
        io::csv_row(f.stream(), {"name", "posts"});
        for (const validity::NameCheck& nc : report.table) {
            if (!nc.hit) io::csv_row(f.stream(), {nc.name, std::to_string(nc.posts)});
        }
        f.commit();
        note_output(ctx, out);
        rec.counts["distinct_" + eco] = report.distinct;
        rec.counts["hits_" + eco] = report.hits;
        if (!notes.empty()) notes += "; ";
        notes += eco + " rate=" + (report.rate ? text::format_g6(*report.rate) : "absent");
    }
    rec.note = notes;
}

void write_manifest(Ctx& ctx, const Config& cfg) {
    json j;
    j["tool"] = "ecolens";
    j["version"] = kVersion;
    const std::string cfg_text = config_to_json_text(cfg);
    j["config"] = json::parse(cfg_text);
    j["config_digest"] = text::hex64(text::fnv1a64(cfg_text));
    json inputs = json::object();
    auto add_input = [&](const std::optional<std::string>& p) {
        if (!p) return;
        const auto d = text::digest_file(*p);
        inputs[*p] = d ? text::hex64(*d) : "unreadable";
    };
    add_input(cfg.posts_xml);
    add_input(cfg.snippets_jsonl);
    add_input(cfg.events_jsonl);
    add_input(cfg.user_countries);
    add_input(cfg.grammars_path);
    for (const auto& [eco, path] : cfg.canonical_lists) {
        add_input(std::optional<std::string>(path));
    }
    j["inputs"] = inputs;
    json stages = json::array();
    for (const StageRecord& r : ctx.records) {
        json s;
        s["name"] = r.name;
        s["status"] = r.status;
        if (!r.note.empty()) s["note"] = r.note;
        s["counts"] = r.counts;
        stages.push_back(s);
    }
    j["stages"] = stages;
    j["outputs"] = ctx.outputs;
    io::AtomicFile f(out_path(ctx, "manifest.json"));
    f.stream() << j.dump(2) << "\n";
    f.commit();
}

} // namespace

void run(const Config& cfg, const RunOptions& opt) {
    validate_config(cfg);
    fs::create_directories(cfg.out_dir);
    Ctx ctx{cfg, opt, {}, {}, {}, {}, {}, {}, {}};
    ctx.snippets_path = cfg.snippets_jsonl
                            ? *cfg.snippets_jsonl
                            : (fs::path(cfg.out_dir) / "snippets.jsonl").string();
    ctx.events_path = cfg.events_jsonl ? *cfg.events_jsonl
                                       : (fs::path(cfg.out_dir) / "events.jsonl").string();

    using StageFn = void (*)(Ctx&, StageRecord&);
    const std::vector<std::pair<std::string, StageFn>> stages = {
        {"ingest", stage_ingest},     {"extract", stage_extract},
        {"novelty", stage_novelty},   {"analytics", stage_analytics},
        {"users", stage_users},       {"geo", stage_geo},
        {"validity", stage_validity},
    };

    for (const auto& [name, fn] : stages) {
        StageRecord rec;
        rec.name = name;
        if (!enabled(ctx, name)) {
            rec.status = "skipped";
            rec.note = "not enabled";
            ctx.records.push_back(std::move(rec));
            continue;
        }
        if (opt.resume && resume_outputs_present(ctx, name)) {
            rec.status = "skipped";
            rec.note = "resume: outputs present";
            record_existing_outputs(ctx, name);
            ctx.records.push_back(std::move(rec));
            continue;
        }
        try {
            fn(ctx, rec);
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.note = e.what();
            ctx.records.push_back(std::move(rec));
            write_manifest(ctx, cfg);
            throw std::runtime_error("stage " + name + " failed: " + e.what());
        }
        ctx.records.push_back(std::move(rec));
    }
    write_manifest(ctx, cfg);
}

} // namespace ecolens::pipeline
