#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ecolens/grammar.hpp"
#include "ecolens/io.hpp"
#include "ecolens/pipeline.hpp"
#include "ecolens/synth.hpp"

namespace fs = std::filesystem;
using namespace ecolens;

namespace {

// Flags shared by the stage subcommands; whatever is set overrides --config.
struct CommonArgs {
    std::string config;
    std::string out_dir;
    std::vector<std::string> langs;
    int threshold = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "JSON pipeline config")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--lang", args.langs, "ecosystem ids (comma separated)")
        ->delimiter(',');
    cmd->add_option("--threshold", args.threshold, "eligibility threshold")
        ->check(CLI::PositiveNumber);
}

pipeline::Config make_config(const CommonArgs& args, const std::vector<std::string>& stages) {
    pipeline::Config cfg =
        args.config.empty() ? pipeline::Config{} : pipeline::load_config(args.config);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (!args.langs.empty()) pipeline::set_ecosystems(cfg, args.langs);
    if (args.threshold > 0) cfg.threshold = args.threshold;
    if (!stages.empty()) cfg.stages = stages;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ecolens: mines Q&A dumps for library-import events and the "
                 "novelty dynamics of software ecosystems"};
    app.require_subcommand(1);

    // ingest
    CommonArgs ingest_args;
    std::string posts_xml;
    CLI::App* cmd_ingest = app.add_subcommand("ingest", "Posts XML dump -> snippets.jsonl");
    add_common(cmd_ingest, ingest_args);
    cmd_ingest->add_option("--posts", posts_xml, "Posts XML dump")->check(CLI::ExistingFile);

    // extract
    CommonArgs extract_args;
    std::string snippets_in, grammars_path;
    bool print_grammars = false;
    CLI::App* cmd_extract = app.add_subcommand("extract", "snippets.jsonl -> events.jsonl");
    add_common(cmd_extract, extract_args);
    cmd_extract->add_option("--snippets", snippets_in, "snippet posts JSONL")
        ->check(CLI::ExistingFile);
    cmd_extract->add_option("--grammars", grammars_path, "grammar definitions JSON")
        ->check(CLI::ExistingFile);
    cmd_extract->add_flag("--print-grammars", print_grammars,
                          "print the active grammar JSON and exit");

    // novelty
    CommonArgs novelty_args;
    std::string events_in_novelty, semantics;
    CLI::App* cmd_novelty =
        app.add_subcommand("novelty", "events.jsonl -> novelties/series/flags CSVs");
    add_common(cmd_novelty, novelty_args);
    cmd_novelty->add_option("--events", events_in_novelty, "import events JSONL")
        ->check(CLI::ExistingFile);
    cmd_novelty->add_option("--semantics", semantics, "threshold semantics: total|subsequent");

    // analyze
    CommonArgs analyze_args;
    std::string events_in_analyze;
    std::int64_t trim = -1;
    CLI::App* cmd_analyze =
        app.add_subcommand("analyze", "fits, concentration tables and figures");
    add_common(cmd_analyze, analyze_args);
    cmd_analyze->add_option("--events", events_in_analyze, "import events JSONL")
        ->check(CLI::ExistingFile);
    cmd_analyze->add_option("--trim", trim, "exclude series samples with N <= trim from fits");

    // users
    CommonArgs users_args;
    std::string events_in_users, experience_source;
    CLI::App* cmd_users = app.add_subcommand("users", "experience-binned novelty rates");
    add_common(cmd_users, users_args);
    cmd_users->add_option("--events", events_in_users, "import events JSONL")
        ->check(CLI::ExistingFile);
    cmd_users->add_option("--experience-source", experience_source,
                          "what counts as a prior post: events|snippet_posts");

    // geo
    CommonArgs geo_args;
    std::string countries;
    std::int64_t min_posts = 0;
    CLI::App* cmd_geo = app.add_subcommand("geo", "per-country novelty rates");
    add_common(cmd_geo, geo_args);
    cmd_geo->add_option("--countries", countries, "user_id,country_code CSV")
        ->check(CLI::ExistingFile);
    cmd_geo->add_option("--min-posts", min_posts, "suppress countries below this many posts")
        ->check(CLI::PositiveNumber);

    // validity
    CommonArgs validity_args;
    std::string canon_path, events_in_validity;
    CLI::App* cmd_validity =
        app.add_subcommand("validity", "share of extracted names found in a canonical list");
    add_common(cmd_validity, validity_args);
    cmd_validity->add_option("--canon", canon_path, "canonical names, one per line")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_validity->add_option("--events", events_in_validity, "import events JSONL")
        ->check(CLI::ExistingFile);

    // run
    CommonArgs run_args;
    bool resume = false;
    CLI::App* cmd_run = app.add_subcommand("run", "full pipeline per config");
    add_common(cmd_run, run_args);
    cmd_run->add_flag("--resume", resume, "skip stages whose outputs already exist");

    // synth
    std::string synth_out = "out", synth_mode = "constant", synth_lang = "synthetic";
    synth::SynthConfig scfg;
    CLI::App* cmd_synth = app.add_subcommand("synth", "synthetic corpus with known growth laws");
    cmd_synth->add_option("--posts", scfg.posts, "number of posts")->check(CLI::PositiveNumber);
    cmd_synth->add_option("--seed", scfg.seed, "RNG seed");
    cmd_synth->add_option("--mode", synth_mode, "constant|decaying");
    cmd_synth->add_option("--p0", scfg.p0, "innovation probability (prefactor)");
    cmd_synth->add_option("--beta", scfg.beta, "decaying-mode exponent");
    cmd_synth->add_option("--libs-min", scfg.libs_min, "min libraries per innovating post");
    cmd_synth->add_option("--libs-max", scfg.libs_max, "max libraries per innovating post");
    cmd_synth->add_option("--users", scfg.users, "author pool size")->check(CLI::PositiveNumber);
    cmd_synth->add_option("--lang", synth_lang, "ecosystem id to stamp on the events");
    cmd_synth->add_option("--out", synth_out, "output directory for events.jsonl");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_ingest->parsed()) {
            pipeline::Config cfg = make_config(ingest_args, {"ingest"});
            if (!posts_xml.empty()) cfg.posts_xml = posts_xml;
            pipeline::run(cfg);
        } else if (cmd_extract->parsed()) {
            if (print_grammars) {
                const grammar::GrammarSet grams =
                    grammars_path.empty() ? grammar::GrammarSet::defaults()
                                          : grammar::GrammarSet::from_json_file(grammars_path);
                std::cout << grams.dump_json();
                return 0;
            }
            pipeline::Config cfg = make_config(extract_args, {"extract"});
            if (!snippets_in.empty()) cfg.snippets_jsonl = snippets_in;
            if (!grammars_path.empty()) cfg.grammars_path = grammars_path;
            pipeline::run(cfg);
        } else if (cmd_novelty->parsed()) {
            pipeline::Config cfg = make_config(novelty_args, {"novelty"});
            if (!events_in_novelty.empty()) cfg.events_jsonl = events_in_novelty;
            if (!semantics.empty()) {
                if (semantics == "subsequent") {
                    cfg.semantics = novelty::ThresholdSemantics::subsequent;
                } else if (semantics == "total") {
                    cfg.semantics = novelty::ThresholdSemantics::total;
                } else {
                    throw std::invalid_argument("unknown --semantics: " + semantics);
                }
            }
            pipeline::run(cfg);
        } else if (cmd_analyze->parsed()) {
            pipeline::Config cfg = make_config(analyze_args, {"analytics"});
            if (!events_in_analyze.empty()) cfg.events_jsonl = events_in_analyze;
            if (trim >= 0) cfg.fit_trim = trim;
            pipeline::run(cfg);
        } else if (cmd_users->parsed()) {
            pipeline::Config cfg = make_config(users_args, {"users"});
            if (!events_in_users.empty()) cfg.events_jsonl = events_in_users;
            if (!experience_source.empty()) {
                cfg.experience_source = users::experience_source_from_string(experience_source);
            }
            pipeline::run(cfg);
        } else if (cmd_geo->parsed()) {
            pipeline::Config cfg = make_config(geo_args, {"geo"});
            if (!countries.empty()) cfg.user_countries = countries;
            if (min_posts > 0) cfg.min_posts_geo = min_posts;
            pipeline::run(cfg);
        } else if (cmd_validity->parsed()) {
            if (validity_args.langs.size() != 1)
                throw std::invalid_argument("validity needs exactly one --lang ecosystem");
            pipeline::Config cfg = make_config(validity_args, {"validity"});
            if (!events_in_validity.empty()) cfg.events_jsonl = events_in_validity;
            cfg.canonical_lists = {{validity_args.langs.front(), canon_path}};
            pipeline::run(cfg);
        } else if (cmd_run->parsed()) {
            pipeline::Config cfg = make_config(run_args, {});
            pipeline::RunOptions opt;
            opt.resume = resume;
            pipeline::run(cfg, opt);
        } else if (cmd_synth->parsed()) {
            scfg.mode = synth::mode_from_string(synth_mode);
            scfg.lang = synth_lang;
            const std::vector<ImportEvent> events = synth::generate(scfg);
            fs::create_directories(synth_out);
            const std::string path = (fs::path(synth_out) / "events.jsonl").string();
            io::write_events(path, events);
            std::cout << path << ": " << events.size() << " events, mode "
                      << synth::to_string(scfg.mode) << ", seed " << scfg.seed << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "ecolens: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
