#include "ecolens/validity.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

#include "ecolens/text.hpp"

namespace ecolens::validity {

CanonicalList load_canonical_list(const std::string& path, const std::string& ecosystem,
                                  const grammar::GrammarSet& grammars) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open canonical list: " + path);
    CanonicalList canon;
    canon.ecosystem = ecosystem;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string name = text::trim(line);
        if (name.empty() || name[0] == '#') continue;
        if (auto norm = grammars.normalize(name, ecosystem)) {
            canon.names.insert(*norm);
        } else {
            ++canon.dropped;
        }
    }
    if (canon.names.empty()) {
        throw std::runtime_error("canonical list is empty: " + path);
    }
    return canon;
}

ValidityReport validity_rate(const std::vector<ImportEvent>& events,
                             const CanonicalList& canon) {
    ValidityReport report;
    report.ecosystem = canon.ecosystem;
    std::map<std::string, std::int64_t> posts_by_name;
    for (const ImportEvent& ev : events) {
        if (ev.lang != canon.ecosystem) {
            throw std::invalid_argument("validity_rate: event ecosystem " + ev.lang +
                                        " does not match list " + canon.ecosystem);
        }
        for (const std::string& lib : ev.libs) ++posts_by_name[lib];
    }
    report.distinct = static_cast<std::int64_t>(posts_by_name.size());
    report.table.reserve(posts_by_name.size());
    for (const auto& [name, posts] : posts_by_name) {
        const bool hit = canon.names.count(name) > 0;
        if (hit) ++report.hits;
        report.table.push_back({name, posts, hit});
    }
    if (report.distinct > 0) {
        report.rate = static_cast<double>(report.hits) / static_cast<double>(report.distinct);
    }
    return report;
}

} // namespace ecolens::validity
