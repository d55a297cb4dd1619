#include "embed.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace cq {

int Vocab::id_of(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? unk_id : it->second;
}

Vocab build_vocab(const std::vector<NormalizedMessage>& messages, std::size_t min_freq) {
    Vocab vocab;
    auto add = [&](const std::string& token) {
        vocab.token_to_id.emplace(token, vocab.size());
        vocab.id_to_token.push_back(token);
    };
    add("<pad>");
    add("<unk>");
    for (const auto& ph : placeholder_tokens())
        add(ph);

    std::map<std::string, std::size_t> freq;
    for (const auto& msg : messages)
        for (const auto& token : msg.tokens)
            if (!vocab.token_to_id.count(token))
                ++freq[token];

    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    for (const auto& [token, count] : ranked)
        if (count >= min_freq)
            add(token);
    return vocab;
}

std::vector<int> encode(const std::vector<std::string>& tokens, const Vocab& vocab, int max_len) {
    if (max_len < 1)
        throw InvalidArgument("encode: max_len must be >= 1");
    if (!vocab.token_to_id.count("<pad>") || !vocab.token_to_id.count("<unk>"))
        throw InvalidArgument("encode: vocab missing <pad>/<unk>");
    std::vector<int> ids(static_cast<std::size_t>(max_len), Vocab::pad_id);
    std::size_t n = std::min(tokens.size(), static_cast<std::size_t>(max_len));
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = vocab.id_of(tokens[i]);
    return ids;
}

EmbeddingTable init_embedding(int vocab_size, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    EmbeddingTable table;
    table.weights = Eigen::MatrixXd(vocab_size, dim);
    for (int r = 0; r < vocab_size; ++r)
        for (int c = 0; c < dim; ++c)
            table.weights(r, c) = dist(rng);
    table.weights.row(0).setZero();
    return table;
}

Eigen::MatrixXd embed_sequence(const std::vector<int>& ids, const EmbeddingTable& table) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), table.dim());
    for (std::size_t t = 0; t < ids.size(); ++t) {
        if (ids[t] < 0 || ids[t] >= table.vocab_size())
            throw InvalidArgument("embed_sequence: id " + std::to_string(ids[t]) + " out of range");
        out.row(static_cast<Eigen::Index>(t)) = table.weights.row(ids[t]);
    }
    return out;
}

Eigen::VectorXd mean_pool(const std::vector<int>& ids, const EmbeddingTable& table) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(table.dim());
    int n = 0;
    for (int id : ids) {
        if (id == Vocab::pad_id)
            continue;
        if (id < 0 || id >= table.vocab_size())
            throw InvalidArgument("mean_pool: id " + std::to_string(id) + " out of range");
        sum += table.weights.row(id).transpose();
        ++n;
    }
    if (n > 0)
        sum /= static_cast<double>(n);
    return sum;
}

} // namespace cq
