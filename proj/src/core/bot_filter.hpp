#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace cq {

/// One non-human-message pattern. Anchored matchers (source begins with '^')
/// are applied to the first message line; the rest match anywhere in the full
/// text. Pattern 6 is author-based and carries an empty matcher.
struct BotPattern {
    int pattern_id = 0;
    std::string description;
    std::string matcher; // case-insensitive ECMAScript regex source, may be empty
};

struct FilterOutcome {
    Corpus kept;
    std::vector<std::pair<CommitRecord, int>> removed;
    std::map<int, std::size_t> stats; // pattern_id -> removal count
};

/// The six built-in patterns: merge-branch records, remote-tracking merges,
/// maven release plugin stamps, cherry-pick trailers, "next development
/// version" stamps, and bot-account authorship.
std::vector<BotPattern> builtin_patterns();

/// Default bot-account author names, matched case-insensitively.
const std::vector<std::string>& builtin_bot_accounts();

/// Returns the lowest-numbered matching pattern_id, or nullopt for a human
/// message. bot_accounts feeds the author-based pattern (id 6).
std::optional<int> classify_bot(const CommitRecord& record,
                                const std::vector<BotPattern>& patterns,
                                const std::vector<std::string>& bot_accounts = builtin_bot_accounts());

/// Partition the corpus into human-written and bot records, preserving the
/// order of kept records. |kept| + |removed| == input size.
FilterOutcome apply_filter(const Corpus& corpus,
                           const std::vector<BotPattern>& patterns,
                           const std::vector<std::string>& bot_accounts = builtin_bot_accounts());

/// Extra patterns from a JSON Lines file of {pattern_id, description, matcher}.
std::vector<BotPattern> read_patterns_file(const std::string& path);

} // namespace cq
