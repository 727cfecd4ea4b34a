#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ecolens/grammar.hpp"
#include "json.hpp"

using namespace ecolens;
using nlohmann::json;

namespace {

struct FixtureCase {
    std::string code;
    std::set<std::string> libs;
};

std::map<std::string, std::vector<FixtureCase>> load_fixtures(const grammar::GrammarSet& gs) {
    std::map<std::string, std::vector<FixtureCase>> out;
    for (const auto& eco : gs.ecosystems()) {
        std::ifstream in(std::string(ECOLENS_FIXTURES) + "/grammar/" + eco + ".jsonl");
        REQUIRE_MESSAGE(bool(in), "fixture corpus missing for " << eco);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            FixtureCase c;
            c.code = j.at("code").get<std::string>();
            for (const auto& l : j.at("libs")) c.libs.insert(l.get<std::string>());
            out[eco].push_back(std::move(c));
        }
    }
    return out;
}

} // namespace

TEST_CASE("default set covers the twelve ecosystems") {
    auto gs = grammar::GrammarSet::defaults();
    auto ecos = gs.ecosystems();
    CHECK(ecos.size() == 12);
    for (const char* e : {"cpp", "csharp", "java", "javascript", "objectivec", "perl",
                          "php", "python", "r", "ruby", "rust", "swift"}) {
        CHECK_MESSAGE(gs.find(e) != nullptr, e);
    }
    CHECK(gs.find("fortran") == nullptr);
}

TEST_CASE("python listing with aliases, from-imports and comma lists") {
    auto gs = grammar::GrammarSet::defaults();
    const std::string code =
        "import pandas as pd\n"
        "from numpy import array\n"
        "import glob, requests\n"
        "import math\n"
        "print(pd.DataFrame())\n";
    CHECK(gs.extract_imports(code, "python") ==
          std::set<std::string>{"pandas", "numpy", "glob", "requests", "math"});
}

TEST_CASE("python grammar is line-anchored and submodule-aware") {
    auto gs = grammar::GrammarSet::defaults();
    using S = std::set<std::string>;
    CHECK(gs.extract_imports("import os.path\n", "python") == S{"os"});
    CHECK(gs.extract_imports("from matplotlib.pyplot import plot\n", "python") ==
          S{"matplotlib"});
    // mentions that are not import statements do not count
    CHECK(gs.extract_imports("# import os\nx = \"import sys\"\n", "python") == S{});
    CHECK(gs.extract_imports("self.import_data()\n", "python") == S{});
    // relative imports are package-internal, not library adoptions
    CHECK(gs.extract_imports("from . import utils\nfrom .models import User\n", "python") == S{});
    // indented imports still count (function-local imports are common)
    CHECK(gs.extract_imports("def f():\n    import json\n    return json\n", "python") ==
          S{"json"});
}

TEST_CASE("normalization rules per ecosystem") {
    auto gs = grammar::GrammarSet::defaults();
    auto norm = [&](const char* raw, const char* eco) {
        auto r = gs.normalize(raw, eco);
        return r ? *r : std::string("(rejected)");
    };
    CHECK(norm("os.path", "python") == "os");
    CHECK(norm(".relative", "python") == "(rejected)");
    // scoped npm packages keep the scope; plain deep paths reduce to the root
    CHECK(norm("@angular/core", "javascript") == "@angular/core");
    CHECK(norm("lodash/fp", "javascript") == "lodash");
    CHECK(norm("./local", "javascript") == "(rejected)");
    CHECK(norm("../up", "javascript") == "(rejected)");
    // jvm/clr namespaces reduce to the first segment
    CHECK(norm("java.util.List", "java") == "java");
    CHECK(norm("com.google.common.collect.ImmutableList", "java") == "com");
    CHECK(norm("System.Collections.Generic", "csharp") == "System");
    // header paths reduce to the root directory, extension dropped
    CHECK(norm("boost/asio.hpp", "cpp") == "boost");
    CHECK(norm("vector", "cpp") == "vector");
    CHECK(norm("UIKit/UIKit.h", "objectivec") == "UIKit");
    CHECK(norm("net/http", "ruby") == "net");
    CHECK(norm("Data::Dumper", "perl") == "Data");
    CHECK(norm("std::collections::HashMap", "rust") == "std");
    // php namespaces are case-insensitive
    CHECK(norm("Symfony\\Component\\HttpFoundation\\Request", "php") == "symfony");
}

TEST_CASE("fixture corpora extract exactly, every ecosystem") {
    auto gs = grammar::GrammarSet::defaults();
    auto fixtures = load_fixtures(gs);
    REQUIRE(fixtures.size() == 12);
    for (const auto& [eco, cases] : fixtures) {
        CHECK_MESSAGE(cases.size() >= 20, eco << " corpus has only " << cases.size());
        for (size_t i = 0; i < cases.size(); ++i) {
            auto got = gs.extract_imports(cases[i].code, eco);
            CHECK_MESSAGE(got == cases[i].libs, eco << " snippet #" << i + 1);
        }
    }
}

TEST_CASE("grammars are mutually isolating on the fixture corpora") {
    // On ecosystem X's corpus, X's own grammar must find strictly more
    // distinct names than any other grammar: applying the wrong grammar to a
    // snippet should mostly come up empty.
    auto gs = grammar::GrammarSet::defaults();
    auto fixtures = load_fixtures(gs);
    auto ecos = gs.ecosystems();
    for (const auto& [corpus_eco, cases] : fixtures) {
        std::map<std::string, std::size_t> distinct;
        for (const auto& g : ecos) {
            std::set<std::string> names;
            for (const auto& c : cases) {
                auto got = gs.extract_imports(c.code, g);
                names.insert(got.begin(), got.end());
            }
            distinct[g] = names.size();
        }
        for (const auto& g : ecos) {
            if (g == corpus_eco) continue;
            CHECK_MESSAGE(distinct[g] < distinct[corpus_eco],
                          g << " grammar finds " << distinct[g] << " names on the "
                            << corpus_eco << " corpus (own grammar: "
                            << distinct[corpus_eco] << ")");
        }
    }
}

TEST_CASE("scan_post produces one event per language with sorted unique libs") {
    auto gs = grammar::GrammarSet::defaults();
    SnippetPost post;
    post.post_id = 42;
    post.ts_ms = 1199145600000;
    post.user_id = 7;
    post.langs = {"python", "r"};
    post.snippets = {"import numpy\nimport numpy\n", "library(dplyr)\nrequire(tidyr)\n"};

    auto events = gs.scan_post(post);
    REQUIRE(events.size() == 2);
    CHECK(events[0].lang == "python");
    CHECK(events[0].libs == std::vector<std::string>{"numpy"});
    CHECK(events[0].post_id == 42);
    REQUIRE(events[0].user_id.has_value());
    CHECK(*events[0].user_id == 7);
    CHECK(events[1].lang == "r");
    CHECK(events[1].libs == std::vector<std::string>{"dplyr", "tidyr"});

    // languages whose grammars match nothing produce no event
    SnippetPost none;
    none.post_id = 43;
    none.langs = {"python"};
    none.snippets = {"x = 1\n"};
    CHECK(gs.scan_post(none).empty());
}

TEST_CASE("grammar config json round trips") {
    auto gs = grammar::GrammarSet::defaults();
    auto text = gs.dump_json();
    auto back = grammar::GrammarSet::from_json_text(text);
    CHECK(back.ecosystems() == gs.ecosystems());
    // behavior survives the round trip
    CHECK(back.extract_imports("import pandas as pd\n", "python") ==
          std::set<std::string>{"pandas"});
    CHECK(back.dump_json() == text);

    CHECK_THROWS_AS(grammar::GrammarSet::from_json_text("{\"nope\":"), std::exception);
    // bad regex fails at load, not at first use
    CHECK_THROWS_AS(grammar::GrammarSet::from_json_text(R"({
        "grammars": [{
            "ecosystem": "x",
            "rules": [{"pattern": "([unclosed", "hint": "x"}]
        }]
    })"),
                    std::exception);
}
