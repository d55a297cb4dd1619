#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"

namespace cq {

enum class UrlKind { pr = 0, issue = 1, other = 2 };

std::string_view url_kind_name(UrlKind kind);

/// Placeholder literals, in canonical order: the three URL kinds, the three
/// code-element kinds, then <enter>.
const std::vector<std::string>& placeholder_tokens();

/// Message text after placeholder substitution, plus its token stream.
/// placeholder_counts maps each placeholder literal to its occurrence count
/// in tokens.
struct NormalizedMessage {
    std::string sha;
    std::string text;
    std::vector<std::string> tokens;
    std::map<std::string, std::size_t> placeholder_counts;

    bool operator==(const NormalizedMessage&) const = default;
};

/// pr when the path contains a /pull/ or /pulls/ segment, issue for /issues/,
/// other for everything else. url must start with http:// or https://.
UrlKind classify_url(std::string_view url);

/// Replace every whitespace-delimited token containing a URL with <pr url>,
/// <issue url> or <other url>. Text before the scheme inside a token is kept;
/// the URL itself runs to the end of the token. Whitespace is preserved
/// verbatim.
std::pair<std::string, std::map<UrlKind, std::size_t>> replace_urls(std::string_view text);

enum class CodeElementKind { file, method, identifier };

/// Replace tokens naming code elements: changed-path basenames -> <file name>,
/// identifier()-style calls -> <method name>, other diff identifiers ->
/// <identifier name>. Matching is case-sensitive and ignores punctuation
/// around the token.
std::pair<std::string, std::map<CodeElementKind, std::size_t>>
replace_code_elements(std::string_view text, const std::set<std::string>& diff_identifiers,
                      const std::vector<std::string>& changed_paths);

/// Every \r\n or \n becomes " <enter> "; consecutive newlines give
/// consecutive <enter> tokens.
std::string replace_newlines(std::string_view text);

/// Full pipeline: replace_urls, replace_code_elements, replace_newlines, then
/// placeholder-aware tokenization. Word tokens are lowercased with leading
/// and trailing punctuation stripped; sentence-final . ! ? survive as their
/// own tokens; placeholder tokens pass through verbatim.
NormalizedMessage normalize_message(const CommitRecord& record);

/// Normalize bare text with no diff context (commit-hook path).
NormalizedMessage normalize_text(const std::string& text, const std::string& sha = "");

/// JSON Lines io. Keys: sha, text, tokens, placeholder_counts.
void write_normalized(const std::vector<NormalizedMessage>& messages, std::ostream& sink);
std::vector<NormalizedMessage> read_normalized(std::istream& source);
void write_normalized_file(const std::vector<NormalizedMessage>& messages, const std::string& path);
std::vector<NormalizedMessage> read_normalized_file(const std::string& path);

} // namespace cq
