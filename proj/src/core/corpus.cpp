#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace cq {

namespace {

constexpr char kRecordSep = '\x1e';
constexpr char kFieldSep = '\x1f';

} // namespace

bool is_valid_sha(std::string_view s) {
    if (s.size() != 40)
        return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

Corpus parse_git_log(std::string_view stream, const std::string& repo_id) {
    Corpus corpus;
    corpus.provenance = "git-log:" + repo_id;

    std::size_t pos = 0;
    std::size_t ordinal = 0;
    while (pos < stream.size()) {
        std::size_t end = stream.find(kRecordSep, pos);
        std::string_view chunk = (end == std::string_view::npos)
                                     ? stream.substr(pos)
                                     : stream.substr(pos, end - pos);
        pos = (end == std::string_view::npos) ? stream.size() : end + 1;

        // git prints a newline between the record terminator and the next
        // record; it belongs to neither field.
        if (ordinal > 0) {
            if (chunk.starts_with("\r\n"))
                chunk.remove_prefix(2);
            else if (chunk.starts_with("\n"))
                chunk.remove_prefix(1);
        }
        if (end == std::string_view::npos &&
            chunk.find_first_not_of(" \t\r\n") == std::string_view::npos)
            break; // trailing whitespace after the last terminator

        ++ordinal;
        std::vector<std::string_view> fields;
        std::size_t f = 0;
        while (true) {
            std::size_t sep = chunk.find(kFieldSep, f);
            if (sep == std::string_view::npos) {
                fields.push_back(chunk.substr(f));
                break;
            }
            fields.push_back(chunk.substr(f, sep - f));
            f = sep + 1;
        }
        if (fields.size() != 4)
            throw ParseError("git log record " + std::to_string(ordinal) + ": expected 4 fields, got " +
                             std::to_string(fields.size()));

        CommitRecord rec;
        rec.repo_id = repo_id;
        rec.sha = std::string(fields[0]);
        if (!is_valid_sha(rec.sha))
            throw ParseError("git log record " + std::to_string(ordinal) + ": invalid sha '" + rec.sha + "'");
        rec.author_name = std::string(fields[1]);
        rec.author_is_account = !rec.author_name.empty();
        try {
            rec.timestamp_utc = std::stoll(std::string(fields[2]));
        } catch (const std::exception&) {
            throw ParseError("git log record " + std::to_string(ordinal) + ": bad timestamp '" +
                             std::string(fields[2]) + "'");
        }
        rec.message_raw = std::string(fields[3]);
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

bool is_english_like(std::string_view message) {
    std::size_t latin = 0;
    std::size_t letters = 0;
    std::size_t i = 0;
    while (i < message.size()) {
        unsigned char c = static_cast<unsigned char>(message[i]);
        if (c < 0x80) {
            if (std::isalpha(c)) {
                ++latin;
                ++letters;
            }
            // ASCII whitespace, digits and punctuation are ignored
            ++i;
        } else {
            // one non-ASCII codepoint; count it as a non-Latin letter
            ++letters;
            if ((c & 0xE0) == 0xC0)
                i += 2;
            else if ((c & 0xF0) == 0xE0)
                i += 3;
            else if ((c & 0xF8) == 0xF0)
                i += 4;
            else
                i += 1; // stray continuation byte
        }
    }
    if (letters == 0)
        return false;
    return static_cast<double>(latin) / static_cast<double>(letters) >= 0.9;
}

std::set<std::string> extract_diff_identifiers(std::string_view diff_text) {
    std::set<std::string> out;
    std::size_t pos = 0;
    while (pos <= diff_text.size()) {
        std::size_t eol = diff_text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? diff_text.substr(pos)
                                    : diff_text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? diff_text.size() + 1 : eol + 1;

        if (line.size() < 2)
            continue;
        bool added = line[0] == '+' && !line.starts_with("+++");
        bool removed = line[0] == '-' && !line.starts_with("---");
        if (!added && !removed)
            continue;

        std::size_t i = 1;
        while (i < line.size()) {
            unsigned char c = static_cast<unsigned char>(line[i]);
            if (std::isalpha(c) || c == '_') {
                std::size_t start = i;
                while (i < line.size()) {
                    unsigned char d = static_cast<unsigned char>(line[i]);
                    if (std::isalnum(d) || d == '_')
                        ++i;
                    else
                        break;
                }
                if (i - start >= 3)
                    out.emplace(line.substr(start, i - start));
            } else {
                ++i;
            }
        }
    }
    return out;
}

namespace {

nlohmann::json record_to_json(const CommitRecord& rec) {
    return nlohmann::json{
        {"repo_id", rec.repo_id},
        {"sha", rec.sha},
        {"author_name", rec.author_name},
        {"author_is_account", rec.author_is_account},
        {"timestamp_utc", rec.timestamp_utc},
        {"message_raw", rec.message_raw},
        {"changed_paths", rec.changed_paths},
        {"diff_identifiers", rec.diff_identifiers},
    };
}

CommitRecord record_from_json(const nlohmann::json& j, std::size_t line_no) {
    auto require = [&](const char* key) -> const nlohmann::json& {
        auto it = j.find(key);
        if (it == j.end())
            throw ParseError("corpus line " + std::to_string(line_no) + ": missing key \"" + key + "\"");
        return *it;
    };
    CommitRecord rec;
    try {
        rec.repo_id = require("repo_id").get<std::string>();
        rec.sha = require("sha").get<std::string>();
        rec.author_name = require("author_name").get<std::string>();
        rec.author_is_account = require("author_is_account").get<bool>();
        rec.timestamp_utc = require("timestamp_utc").get<std::int64_t>();
        rec.message_raw = require("message_raw").get<std::string>();
        rec.changed_paths = require("changed_paths").get<std::vector<std::string>>();
        rec.diff_identifiers = require("diff_identifiers").get<std::set<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!is_valid_sha(rec.sha))
        throw ParseError("corpus line " + std::to_string(line_no) + ": invalid sha '" + rec.sha + "'");
    return rec;
}

} // namespace

void write_corpus(const Corpus& corpus, std::ostream& sink) {
    for (const auto& rec : corpus.records)
        sink << record_to_json(rec).dump() << '\n';
}

Corpus read_corpus(std::istream& source) {
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    std::unordered_set<std::string> seen;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("corpus line " + std::to_string(line_no) + ": not valid JSON");
        CommitRecord rec = record_from_json(j, line_no);
        if (!seen.insert(rec.sha).second)
            throw ParseError("corpus line " + std::to_string(line_no) + ": duplicate sha '" + rec.sha + "'");
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    write_corpus(corpus, out);
    if (!out)
        throw IoError("write failed: " + path);
}

Corpus read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);
    Corpus corpus = read_corpus(in);
    corpus.provenance = "file:" + path;
    return corpus;
}

} // namespace cq
