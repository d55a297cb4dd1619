#include "normalize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>

#include <json.hpp>

namespace cq {

std::string_view url_kind_name(UrlKind kind) {
    switch (kind) {
    case UrlKind::pr: return "pr";
    case UrlKind::issue: return "issue";
    case UrlKind::other: return "other";
    }
    return "other";
}

const std::vector<std::string>& placeholder_tokens() {
    static const std::vector<std::string> tokens = {
        "<pr url>", "<issue url>", "<other url>",
        "<file name>", "<method name>", "<identifier name>",
        "<enter>",
    };
    return tokens;
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::size_t find_scheme(std::string_view token) {
    std::size_t h = token.find("http://");
    std::size_t hs = token.find("https://");
    return std::min(h, hs);
}

/// Apply `rewrite` to each maximal non-whitespace run; whitespace between
/// runs is copied through unchanged.
std::string map_tokens(std::string_view text,
                       const std::function<std::string(std::string_view)>& rewrite) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_space(text[i])) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i]))
            ++i;
        out += rewrite(text.substr(start, i - start));
    }
    return out;
}

bool is_placeholder_core(std::string_view core) {
    const auto& ph = placeholder_tokens();
    return std::find(ph.begin(), ph.end(), core) != ph.end() || core == "<enter>";
}

struct StrippedToken {
    std::string_view prefix; // leading punctuation
    std::string_view core;
    std::string_view suffix; // trailing punctuation
};

StrippedToken strip_punct(std::string_view token) {
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(token[b])) && token[b] != '<')
        ++b;
    // keep a trailing () call suffix intact
    while (e > b && std::ispunct(static_cast<unsigned char>(token[e - 1])) && token[e - 1] != '>') {
        if (e - b >= 2 && token[e - 2] == '(' && token[e - 1] == ')')
            break;
        --e;
    }
    return {token.substr(0, b), token.substr(b, e - b), token.substr(e)};
}

bool identifier_like_stem(std::string_view stem) {
    if (stem.empty())
        return false;
    unsigned char first = static_cast<unsigned char>(stem.front());
    if (!std::isalpha(first) && first != '_')
        return false;
    return std::all_of(stem.begin(), stem.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.';
    });
}

std::string_view basename_of(std::string_view path) {
    std::size_t slash = path.find_last_of('/');
    return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

} // namespace

UrlKind classify_url(std::string_view url) {
    if (!url.starts_with("http://") && !url.starts_with("https://"))
        throw InvalidArgument("classify_url: not a URL: " + std::string(url));
    if (url.find("/pull/") != std::string_view::npos || url.find("/pulls/") != std::string_view::npos)
        return UrlKind::pr;
    if (url.find("/issues/") != std::string_view::npos)
        return UrlKind::issue;
    return UrlKind::other;
}

std::pair<std::string, std::map<UrlKind, std::size_t>> replace_urls(std::string_view text) {
    std::map<UrlKind, std::size_t> counts;
    std::string out = map_tokens(text, [&](std::string_view token) -> std::string {
        std::size_t scheme = find_scheme(token);
        if (scheme == std::string_view::npos)
            return std::string(token);
        UrlKind kind = classify_url(token.substr(scheme));
        ++counts[kind];
        std::string replaced(token.substr(0, scheme));
        replaced += "<";
        replaced += url_kind_name(kind);
        replaced += " url>";
        return replaced;
    });
    return {std::move(out), std::move(counts)};
}

std::pair<std::string, std::map<CodeElementKind, std::size_t>>
replace_code_elements(std::string_view text, const std::set<std::string>& diff_identifiers,
                      const std::vector<std::string>& changed_paths) {
    std::set<std::string, std::less<>> basenames;
    for (const auto& path : changed_paths)
        basenames.emplace(basename_of(path));

    std::map<CodeElementKind, std::size_t> counts;
    std::string out = map_tokens(text, [&](std::string_view token) -> std::string {
        auto [prefix, core, suffix] = strip_punct(token);
        if (core.empty() || is_placeholder_core(core) || core.front() == '<')
            return std::string(token);

        const char* placeholder = nullptr;
        if (basenames.count(core)) {
            placeholder = "<file name>";
            ++counts[CodeElementKind::file];
        } else if (core.ends_with("()") && identifier_like_stem(core.substr(0, core.size() - 2))) {
            placeholder = "<method name>";
            ++counts[CodeElementKind::method];
        } else if (diff_identifiers.count(std::string(core))) {
            placeholder = "<identifier name>";
            ++counts[CodeElementKind::identifier];
        }
        if (!placeholder)
            return std::string(token);
        std::string replaced(prefix);
        replaced += placeholder;
        replaced += suffix;
        return replaced;
    });
    return {std::move(out), std::move(counts)};
}

std::string replace_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            out += " <enter> ";
            i += 2;
        } else if (c == '\n' || c == '\r') {
            out += " <enter> ";
            ++i;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

namespace {

/// Emit tokens for one non-whitespace run that is not a placeholder: strip
/// punctuation, lowercase, keep sentence-final markers as separate tokens.
void emit_word(std::string_view word, std::vector<std::string>& tokens) {
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(word[b])))
        ++b;
    std::vector<char> markers;
    while (e > b && std::ispunct(static_cast<unsigned char>(word[e - 1]))) {
        char c = word[e - 1];
        if (c == '.' || c == '!' || c == '?')
            markers.push_back(c);
        --e;
    }
    std::reverse(markers.begin(), markers.end()); // back to textual order
    if (e > b) {
        std::string core(word.substr(b, e - b));
        std::transform(core.begin(), core.end(), core.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        tokens.push_back(std::move(core));
    }
    for (char m : markers)
        tokens.emplace_back(1, m);
}

std::vector<std::string> tokenize(std::string_view text) {
    const auto& placeholders = placeholder_tokens();
    std::vector<std::string> tokens;
    std::string word;
    std::size_t i = 0;
    auto flush_word = [&]() {
        if (!word.empty()) {
            emit_word(word, tokens);
            word.clear();
        }
    };
    while (i < text.size()) {
        if (is_space(text[i])) {
            flush_word();
            ++i;
            continue;
        }
        bool matched = false;
        if (text[i] == '<') {
            for (const auto& ph : placeholders) {
                if (text.substr(i).starts_with(ph)) {
                    flush_word();
                    tokens.push_back(ph);
                    i += ph.size();
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            word.push_back(text[i]);
            ++i;
        }
    }
    flush_word();
    return tokens;
}

} // namespace

NormalizedMessage normalize_message(const CommitRecord& record) {
    NormalizedMessage msg;
    msg.sha = record.sha;

    auto [no_urls, url_counts] = replace_urls(record.message_raw);
    auto [no_code, code_counts] =
        replace_code_elements(no_urls, record.diff_identifiers, record.changed_paths);
    msg.text = replace_newlines(no_code);
    msg.tokens = tokenize(msg.text);

    for (const auto& token : msg.tokens) {
        const auto& ph = placeholder_tokens();
        if (std::find(ph.begin(), ph.end(), token) != ph.end())
            ++msg.placeholder_counts[token];
    }
    return msg;
}

NormalizedMessage normalize_text(const std::string& text, const std::string& sha) {
    CommitRecord rec;
    rec.sha = sha;
    rec.message_raw = text;
    NormalizedMessage msg = normalize_message(rec);
    msg.sha = sha;
    return msg;
}

void write_normalized(const std::vector<NormalizedMessage>& messages, std::ostream& sink) {
    for (const auto& msg : messages) {
        nlohmann::json j{
            {"sha", msg.sha},
            {"text", msg.text},
            {"tokens", msg.tokens},
            {"placeholder_counts", msg.placeholder_counts},
        };
        sink << j.dump() << '\n';
    }
}

std::vector<NormalizedMessage> read_normalized(std::istream& source) {
    std::vector<NormalizedMessage> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("normalized line " + std::to_string(line_no) + ": not valid JSON");
        NormalizedMessage msg;
        try {
            msg.sha = j.at("sha").get<std::string>();
            msg.text = j.at("text").get<std::string>();
            msg.tokens = j.at("tokens").get<std::vector<std::string>>();
            msg.placeholder_counts =
                j.at("placeholder_counts").get<std::map<std::string, std::size_t>>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("normalized line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(msg));
    }
    return out;
}

void write_normalized_file(const std::vector<NormalizedMessage>& messages, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    write_normalized(messages, out);
}

std::vector<NormalizedMessage> read_normalized_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);
    return read_normalized(in);
}

} // namespace cq
