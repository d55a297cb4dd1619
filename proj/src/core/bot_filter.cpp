#include "bot_filter.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

#include <json.hpp>

namespace cq {

std::vector<BotPattern> builtin_patterns() {
    return {
        {1, "merge branch <branch> (of <project url>) (into <branch>)",
         R"(^merge branch \S+( of \S+)?( into \S+)?)"},
        {2, "merge remote-tracking branch <branch> (into <branch>)",
         R"(^merge remote-tracking branch \S+( into \S+)?)"},
        {3, "[maven-release-plugin]", R"(\[maven-release-plugin\])"},
        {4, "...cherry picked from commit <commit url>", R"(cherry picked from commit)"},
        {5, "next development version <version number>", R"(^next development version \S+)"},
        {6, "message written by non-human accounts or no author", ""},
    };
}

const std::vector<std::string>& builtin_bot_accounts() {
    static const std::vector<std::string> accounts = {"spring operator", "dependabot[bot]"};
    return accounts;
}

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view first_line(std::string_view text) {
    std::size_t eol = text.find('\n');
    std::string_view line = (eol == std::string_view::npos) ? text : text.substr(0, eol);
    if (line.ends_with('\r'))
        line.remove_suffix(1);
    return line;
}

bool author_matches(const CommitRecord& record, const std::vector<std::string>& bot_accounts) {
    if (!record.author_is_account)
        return true; // "no author"
    std::string name = lower_ascii(record.author_name);
    return std::any_of(bot_accounts.begin(), bot_accounts.end(),
                       [&](const std::string& a) { return lower_ascii(a) == name; });
}

} // namespace

std::optional<int> classify_bot(const CommitRecord& record,
                                const std::vector<BotPattern>& patterns,
                                const std::vector<std::string>& bot_accounts) {
    if (patterns.empty())
        throw InvalidArgument("classify_bot: empty pattern list");

    std::vector<const BotPattern*> ordered;
    ordered.reserve(patterns.size());
    for (const auto& p : patterns)
        ordered.push_back(&p);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const BotPattern* a, const BotPattern* b) { return a->pattern_id < b->pattern_id; });

    for (const BotPattern* p : ordered) {
        if (p->matcher.empty()) {
            if (author_matches(record, bot_accounts))
                return p->pattern_id;
            continue;
        }
        std::regex re(p->matcher, std::regex::ECMAScript | std::regex::icase);
        bool anchored = p->matcher.front() == '^';
        std::string_view target = anchored ? first_line(record.message_raw)
                                           : std::string_view(record.message_raw);
        if (std::regex_search(target.begin(), target.end(), re))
            return p->pattern_id;
    }
    return std::nullopt;
}

FilterOutcome apply_filter(const Corpus& corpus,
                           const std::vector<BotPattern>& patterns,
                           const std::vector<std::string>& bot_accounts) {
    FilterOutcome outcome;
    outcome.kept.provenance = corpus.provenance;
    for (const auto& rec : corpus.records) {
        if (auto id = classify_bot(rec, patterns, bot_accounts)) {
            outcome.removed.emplace_back(rec, *id);
            ++outcome.stats[*id];
        } else {
            outcome.kept.records.push_back(rec);
        }
    }
    return outcome;
}

std::vector<BotPattern> read_patterns_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);
    std::vector<BotPattern> patterns;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("patterns line " + std::to_string(line_no) + ": not valid JSON");
        BotPattern p;
        try {
            p.pattern_id = j.at("pattern_id").get<int>();
            p.description = j.value("description", "");
            p.matcher = j.at("matcher").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("patterns line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!p.matcher.empty()) {
            try {
                std::regex probe(p.matcher, std::regex::ECMAScript | std::regex::icase);
            } catch (const std::regex_error& e) {
                throw ParseError("patterns line " + std::to_string(line_no) + ": bad regex: " + e.what());
            }
        }
        patterns.push_back(std::move(p));
    }
    return patterns;
}

} // namespace cq
