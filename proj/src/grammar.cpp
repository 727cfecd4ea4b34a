#include "ecolens/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ecolens/text.hpp"
#include "json.hpp"

namespace ecolens::grammar {

namespace {

using nlohmann::json;

void compile_rule(Rule& r) {
    r.re = std::regex(r.pattern, std::regex::ECMAScript | std::regex::optimize);
    r.anchored = !r.pattern.empty() && r.pattern[0] == '^';
}

Rule make_rule(std::string pattern, std::string hint, bool comma_list = false,
               bool not_after_word = false) {
    Rule r;
    r.pattern = std::move(pattern);
    r.hint = std::move(hint);
    r.comma_list = comma_list;
    r.not_after_word = not_after_word;
    compile_rule(r);
    return r;
}

bool valid_token(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '.' || c == '-' || c == '+';
        if (!ok) return false;
    }
    return s != "." && s != "..";
}

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == ':' || c == '@';
}

std::string strip_quotes(std::string s) {
    while (s.size() >= 2 && (s.front() == '\'' || s.front() == '"' || s.front() == '`') &&
           s.back() == s.front()) {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

} // namespace

std::optional<std::string> normalize_name(const std::string& raw, const NormRule& rule) {
    std::string s = strip_quotes(text::trim(raw));
    if (s.empty()) return std::nullopt;
    auto excluded = [&](const std::string& v) {
        return std::find(rule.exclusions.begin(), rule.exclusions.end(), v) !=
               rule.exclusions.end();
    };
    if (excluded(s)) return std::nullopt;
    if (s[0] == '.') return std::nullopt; // relative import
    if (s[0] == '/') return std::nullopt; // absolute path
    if (s[0] == '@') {
        if (!rule.scoped_npm) return std::nullopt;
        // keep "@scope/name", drop any deeper subpath
        std::size_t s1 = s.find('/');
        if (s1 == std::string::npos || s1 + 1 >= s.size()) return std::nullopt;
        std::size_t s2 = s.find('/', s1 + 1);
        std::string scope = s.substr(1, s1 - 1);
        std::string name =
            s2 == std::string::npos ? s.substr(s1 + 1) : s.substr(s1 + 1, s2 - s1 - 1);
        if (!valid_token(scope) || !valid_token(name)) return std::nullopt;
        return "@" + scope + "/" + name;
    }
    if (!rule.separator.empty()) {
        std::vector<std::string> segs;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            std::size_t next = s.find(rule.separator, pos);
            if (next == std::string::npos) {
                segs.push_back(s.substr(pos));
                break;
            }
            segs.push_back(s.substr(pos, next - pos));
            pos = next + rule.separator.size();
        }
        int depth = std::max(1, rule.root_depth);
        std::string joined;
        for (int i = 0; i < depth && i < (int)segs.size(); ++i) {
            if (i) joined += rule.separator;
            joined += segs[i];
        }
        s = joined;
    }
    for (const auto& ext : rule.strip_exts) {
        if (s.size() > ext.size() && s.compare(s.size() - ext.size(), ext.size(), ext) == 0) {
            s.resize(s.size() - ext.size());
            break;
        }
    }
    if (rule.lowercase) s = text::to_lower(s);
    if (excluded(s)) return std::nullopt;
    if (!valid_token(s)) return std::nullopt;
    return s;
}

GrammarSet GrammarSet::defaults() {
    GrammarSet gs;
    auto add = [&](Grammar g) { gs.grammars_[g.ecosystem] = std::move(g); };

    {
        Grammar g;
        g.ecosystem = "python";
        g.norm = {".", 1, false, {}, false, {}};
        g.rules.push_back(make_rule(
            R"(^\s*import\s+([A-Za-z_][\w.]*(?:\s+as\s+\w+)?(?:\s*,\s*[A-Za-z_][\w.]*(?:\s+as\s+\w+)?)*))",
            "import", /*comma_list=*/true));
        g.rules.push_back(make_rule(R"(^\s*from\s+([A-Za-z_][\w.]*)\s+import\b)", "from"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "r";
        g.norm = {"", 1, false, {}, false, {}};
        g.rules.push_back(
            make_rule(R"(\blibrary\s*\(\s*["']?([A-Za-z][A-Za-z0-9.]*)["']?\s*[,)])", "library"));
        g.rules.push_back(
            make_rule(R"(\brequire\s*\(\s*["']?([A-Za-z][A-Za-z0-9.]*)["']?\s*[,)])", "require"));
        g.rules.push_back(make_rule(R"(([A-Za-z][A-Za-z0-9.]*)::)", "::", false,
                                    /*not_after_word=*/true));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "javascript";
        g.norm = {"/", 1, true, {}, false, {}};
        g.rules.push_back(make_rule(R"(\brequire\s*\(\s*['"]([^'"]+)['"]\s*\))", "require"));
        g.rules.push_back(make_rule(R"(\bfrom\s+['"]([^'"]+)['"])", "from"));
        g.rules.push_back(make_rule(R"(^\s*import\s+['"]([^'"]+)['"])", "import"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "java";
        g.norm = {".", 1, false, {}, false, {}};
        g.rules.push_back(make_rule(
            R"(\bimport\s+(?:static\s+)?([a-z_]\w*(?:\.\w+)*(?:\.\*)?)\s*;)", "import"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "cpp";
        g.norm = {"/", 1, false, {".h", ".hpp", ".hh", ".hxx"}, false, {}};
        g.rules.push_back(make_rule(R"(#\s*include\s*[<"]([^>"]+)[">])", "include"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "php";
        g.norm = {"\\", 1, false, {".php"}, true, {}};
        g.rules.push_back(make_rule(
            R"(^\s*use\s+(?:function\s+|const\s+)?\\?([A-Za-z_]\w*(?:\\\w+)*)\s*(?:;|\s+as\b))",
            "use"));
        g.rules.push_back(make_rule(
            R"(\brequire(?:_once)?\s*\(?\s*['"]([^'"]+\.php)['"])", "require"));
        g.rules.push_back(make_rule(
            R"(\binclude(?:_once)?\s*\(?\s*['"]([^'"]+\.php)['"])", "include"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "ruby";
        g.norm = {"/", 1, false, {".rb"}, false, {}};
        g.rules.push_back(make_rule(R"(\brequire\s*\(?\s*['"]([^'"]+)['"]\s*\)?)", "require"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "perl";
        g.norm = {"::", 1, false, {}, false, {}};
        g.rules.push_back(make_rule(R"(\buse\s+([A-Za-z_]\w*(?:::\w+)*))", "use"));
        g.rules.push_back(make_rule(R"(\brequire\s+([A-Za-z_]\w*(?:::\w+)*)\s*;)", "require"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "rust";
        g.norm = {"::", 1, false, {}, false, {"crate", "self", "super"}};
        g.rules.push_back(make_rule(
            R"(^\s*(?:pub(?:\([^)]*\))?\s+)?use\s+([A-Za-z_]\w*)\s*(?:::|;| as ))", "use"));
        g.rules.push_back(make_rule(R"(\bextern\s+crate\s+([A-Za-z_]\w*))", "extern"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "swift";
        g.norm = {".", 1, false, {}, false, {}};
        g.rules.push_back(make_rule(
            R"(^\s*(?:@testable\s+)?import\s+(?:(?:class|struct|enum|protocol|typealias|func|var|let)\s+)?([A-Za-z_]\w*))",
            "import"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "objectivec";
        g.norm = {"/", 1, false, {".h"}, false, {}};
        g.rules.push_back(make_rule(R"(#\s*import\s*[<"]([^>"]+)[">])", "import"));
        g.rules.push_back(make_rule(R"(@import\s+([A-Za-z_]\w*)\s*;)", "@import"));
        add(std::move(g));
    }
    {
        Grammar g;
        g.ecosystem = "csharp";
        g.norm = {".", 1, false, {}, false, {}};
        g.rules.push_back(make_rule(
            R"(^\s*(?:global\s+)?using\s+(?:static\s+)?([A-Za-z_]\w*(?:\.\w+)*)\s*;)", "using"));
        g.rules.push_back(
            make_rule(R"(^\s*using\s+\w+\s*=\s*([A-Za-z_]\w*(?:\.\w+)*)\s*;)", "using"));
        add(std::move(g));
    }
    return gs;
}

const Grammar* GrammarSet::find(const std::string& ecosystem) const {
    auto it = grammars_.find(ecosystem);
    return it == grammars_.end() ? nullptr : &it->second;
}

std::vector<std::string> GrammarSet::ecosystems() const {
    std::vector<std::string> out;
    out.reserve(grammars_.size());
    for (const auto& [k, _] : grammars_) out.push_back(k);
    return out;
}

std::set<std::string> GrammarSet::extract_imports(const std::string& snippet,
                                                  const std::string& ecosystem) const {
    std::set<std::string> out;
    const Grammar* g = find(ecosystem);
    if (!g) throw std::runtime_error("no grammar registered for ecosystem: " + ecosystem);

    auto emit = [&](const std::string& raw, const Rule& rule) {
        const NormRule& nr = rule.norm ? *rule.norm : g->norm;
        if (rule.comma_list) {
            std::size_t pos = 0;
            while (pos <= raw.size()) {
                std::size_t next = raw.find(',', pos);
                std::string part = text::trim(
                    next == std::string::npos ? raw.substr(pos) : raw.substr(pos, next - pos));
                // drop "as alias": the name is the first whitespace token
                std::size_t ws = part.find_first_of(" \t");
                if (ws != std::string::npos) part = part.substr(0, ws);
                if (auto n = normalize_name(part, nr)) out.insert(*n);
                if (next == std::string::npos) break;
                pos = next + 1;
            }
        } else if (auto n = normalize_name(raw, nr)) {
            out.insert(*n);
        }
    };

    std::size_t start = 0;
    while (start <= snippet.size()) {
        std::size_t eol = snippet.find('\n', start);
        std::string line =
            eol == std::string::npos ? snippet.substr(start) : snippet.substr(start, eol - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();

        for (const auto& rule : g->rules) {
            if (!rule.hint.empty() && line.find(rule.hint) == std::string::npos) continue;
            if (rule.anchored) {
                std::smatch m;
                if (std::regex_search(line, m, rule.re)) emit(m[1].str(), rule);
            } else {
                auto begin = std::sregex_iterator(line.begin(), line.end(), rule.re);
                for (auto it = begin; it != std::sregex_iterator(); ++it) {
                    if (rule.not_after_word) {
                        std::size_t pos = (std::size_t)it->position(0);
                        if (pos > 0 && is_word_char(line[pos - 1])) continue;
                    }
                    emit((*it)[1].str(), rule);
                }
            }
        }
        if (eol == std::string::npos) break;
        start = eol + 1;
    }
    return out;
}

std::optional<std::string> GrammarSet::normalize(const std::string& raw,
                                                 const std::string& ecosystem) const {
    const Grammar* g = find(ecosystem);
    if (!g) throw std::runtime_error("no grammar registered for ecosystem: " + ecosystem);
    return normalize_name(raw, g->norm);
}

std::vector<ImportEvent> GrammarSet::scan_post(const SnippetPost& post) const {
    std::vector<ImportEvent> out;
    for (const auto& lang : post.langs) {
        if (!find(lang)) continue; // not a configured ecosystem
        std::set<std::string> libs;
        for (const auto& snip : post.snippets) {
            auto got = extract_imports(snip, lang);
            libs.insert(got.begin(), got.end());
        }
        if (libs.empty()) continue;
        ImportEvent ev;
        ev.lang = lang;
        ev.post_id = post.post_id;
        ev.ts_ms = post.ts_ms;
        ev.user_id = post.user_id;
        ev.libs.assign(libs.begin(), libs.end());
        out.push_back(std::move(ev));
    }
    return out;
}

// --- JSON config ---------------------------------------------------------

namespace {

json norm_to_json(const NormRule& n) {
    return json{{"separator", n.separator},   {"root_depth", n.root_depth},
                {"scoped_npm", n.scoped_npm}, {"strip_exts", n.strip_exts},
                {"lowercase", n.lowercase},   {"exclusions", n.exclusions}};
}

NormRule norm_from_json(const json& j) {
    NormRule n;
    n.separator = j.value("separator", std::string());
    n.root_depth = j.value("root_depth", 1);
    n.scoped_npm = j.value("scoped_npm", false);
    n.strip_exts = j.value("strip_exts", std::vector<std::string>{});
    n.lowercase = j.value("lowercase", false);
    n.exclusions = j.value("exclusions", std::vector<std::string>{});
    return n;
}

} // namespace

std::string GrammarSet::dump_json() const {
    json out;
    out["grammars"] = json::array();
    for (const auto& [eco, g] : grammars_) {
        json jg;
        jg["ecosystem"] = eco;
        jg["norm"] = norm_to_json(g.norm);
        jg["rules"] = json::array();
        for (const auto& r : g.rules) {
            json jr;
            jr["pattern"] = r.pattern;
            jr["hint"] = r.hint;
            if (r.comma_list) jr["comma_list"] = true;
            if (r.not_after_word) jr["not_after_word"] = true;
            if (r.norm) jr["norm"] = norm_to_json(*r.norm);
            jg["rules"].push_back(std::move(jr));
        }
        out["grammars"].push_back(std::move(jg));
    }
    return out.dump(2) + "\n";
}

GrammarSet GrammarSet::from_json_text(const std::string& text) {
    json j = json::parse(text);
    GrammarSet gs;
    for (const auto& jg : j.at("grammars")) {
        Grammar g;
        g.ecosystem = jg.at("ecosystem").get<std::string>();
        if (jg.contains("norm")) g.norm = norm_from_json(jg["norm"]);
        for (const auto& jr : jg.at("rules")) {
            Rule r;
            r.pattern = jr.at("pattern").get<std::string>();
            r.hint = jr.value("hint", std::string());
            r.comma_list = jr.value("comma_list", false);
            r.not_after_word = jr.value("not_after_word", false);
            if (jr.contains("norm")) r.norm = norm_from_json(jr["norm"]);
            try {
                compile_rule(r);
            } catch (const std::regex_error& e) {
                throw std::runtime_error("bad pattern for " + g.ecosystem + ": " + e.what());
            }
            g.rules.push_back(std::move(r));
        }
        gs.grammars_[g.ecosystem] = std::move(g);
    }
    return gs;
}

GrammarSet GrammarSet::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grammar config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

} // namespace ecolens::grammar
