#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "normalize.hpp"

namespace cq {

/// Token ids: 0 = <pad>, 1 = <unk>, then the placeholder tokens, then corpus
/// tokens by descending frequency (ties broken lexicographically).
struct Vocab {
    std::unordered_map<std::string, int> token_to_id;
    std::vector<std::string> id_to_token;

    static constexpr int pad_id = 0;
    static constexpr int unk_id = 1;

    int size() const { return static_cast<int>(id_to_token.size()); }
    int id_of(const std::string& token) const;

    bool operator==(const Vocab& other) const { return id_to_token == other.id_to_token; }
};

Vocab build_vocab(const std::vector<NormalizedMessage>& messages, std::size_t min_freq = 1);

/// Map tokens to ids (<unk> for OOV), right-truncate to max_len, right-pad
/// with <pad>. Output length is exactly max_len.
std::vector<int> encode(const std::vector<std::string>& tokens, const Vocab& vocab, int max_len);

/// V x E lookup table. Row 0 (<pad>) is the zero vector and is excluded from
/// gradient updates.
struct EmbeddingTable {
    Eigen::MatrixXd weights; // V x E

    int vocab_size() const { return static_cast<int>(weights.rows()); }
    int dim() const { return static_cast<int>(weights.cols()); }
};

/// Uniform init in [-0.05, 0.05] from the seed; row 0 zeroed.
EmbeddingTable init_embedding(int vocab_size, int dim, std::uint64_t seed);

/// Row t of the result is the table row for ids[t]. Throws on out-of-range ids.
Eigen::MatrixXd embed_sequence(const std::vector<int>& ids, const EmbeddingTable& table);

/// Mean of the non-pad embedding rows; zero vector for an all-pad sequence.
Eigen::VectorXd mean_pool(const std::vector<int>& ids, const EmbeddingTable& table);

} // namespace cq
