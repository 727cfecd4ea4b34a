#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecolens/types.hpp"

namespace ecolens::io {

// --- CSV ---

std::string csv_escape(std::string_view field);

// Writes one row, escaping fields that need it.
void csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Splits one CSV line, honoring double-quote escaping.
std::vector<std::string> csv_split(std::string_view line);

// --- JSONL corpora ---

struct LineDiagnostics {
    std::int64_t read = 0;
    std::int64_t skipped = 0;
};

std::vector<SnippetPost> read_snippet_posts(const std::string& path, LineDiagnostics* diag = nullptr);
void write_snippet_posts(const std::string& path, const std::vector<SnippetPost>& posts);

std::vector<ImportEvent> read_events(const std::string& path, LineDiagnostics* diag = nullptr);
void write_events(const std::string& path, const std::vector<ImportEvent>& events);

std::string snippet_post_to_json(const SnippetPost& p);
std::string event_to_json(const ImportEvent& e);

// --- flags.csv ---

struct FlagRow {
    std::string lang;
    PostFlags flags;
};

void write_flags_csv(const std::string& path, const std::vector<FlagRow>& rows);
std::vector<FlagRow> read_flags_csv(const std::string& path);

// Opens an output file via a temp file in the same directory (or
// ECOLENS_TMPDIR when set) and renames it into place on success.
class AtomicFile {
public:
    explicit AtomicFile(const std::string& path);
    ~AtomicFile();
    std::ofstream& stream() { return out_; }
    void commit();

private:
    std::string path_;
    std::string tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

} // namespace ecolens::io
