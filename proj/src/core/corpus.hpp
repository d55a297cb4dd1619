#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace cq {

/// One mined commit. message_raw keeps the original newlines and casing;
/// nothing is normalized at ingest time.
struct CommitRecord {
    std::string repo_id;
    std::string sha;                          // 40-char lowercase hex
    std::string author_name;                  // may be empty
    bool author_is_account = true;            // false when the forge has no linked account
    std::int64_t timestamp_utc = 0;           // seconds since epoch
    std::string message_raw;
    std::vector<std::string> changed_paths;   // no duplicates
    std::set<std::string> diff_identifiers;   // identifiers mined from the diff

    bool operator==(const CommitRecord&) const = default;
};

struct Corpus {
    std::vector<CommitRecord> records;
    std::string provenance;                   // repo path or API URL + fetch window

    std::size_t size() const { return records.size(); }
    bool operator==(const Corpus&) const = default;
};

/// True iff s is exactly 40 lowercase hex characters.
bool is_valid_sha(std::string_view s);

/// Parse the output of
///   git log --pretty=format:%H%x1f%an%x1f%at%x1f%B%x1e
/// Record separator U+001E, field separator U+001F. Throws ParseError naming
/// the 1-based record ordinal on a wrong field count or an invalid sha.
Corpus parse_git_log(std::string_view stream, const std::string& repo_id);

/// Latin-letter-ratio heuristic: true iff at least one letter exists and the
/// fraction of non-whitespace/digit/punctuation characters that are basic
/// Latin letters is >= 0.9. Counts Unicode codepoints, not bytes.
bool is_english_like(std::string_view message);

/// Tokenize added/removed diff lines and keep tokens that look like code
/// identifiers ([A-Za-z_][A-Za-z0-9_]*, length >= 3).
std::set<std::string> extract_diff_identifiers(std::string_view diff_text);

/// JSON Lines round trip. Keys per record: repo_id, sha, author_name,
/// author_is_account, timestamp_utc, message_raw, changed_paths,
/// diff_identifiers. read(write(c)) == c field-for-field.
void write_corpus(const Corpus& corpus, std::ostream& sink);
Corpus read_corpus(std::istream& source);

void write_corpus_file(const Corpus& corpus, const std::string& path);
Corpus read_corpus_file(const std::string& path);

} // namespace cq
