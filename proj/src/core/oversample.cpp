#include "oversample.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cq {

namespace {

struct ClassSplit {
    std::vector<std::size_t> minority;
    std::vector<std::size_t> majority;
    int minority_label = 0;
};

ClassSplit split_classes(const std::vector<int>& labels) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw InvalidArgument("oversample: input must contain both classes");
    ClassSplit split;
    if (pos.size() <= neg.size()) {
        split.minority = std::move(pos);
        split.majority = std::move(neg);
        split.minority_label = 1;
    } else {
        split.minority = std::move(neg);
        split.majority = std::move(pos);
        split.minority_label = 0;
    }
    return split;
}

/// Indices of the k nearest points to `from` within `candidates` (excluding
/// `from` itself), ties broken by index for determinism.
std::vector<std::size_t> k_nearest(const std::vector<Eigen::VectorXd>& vectors, std::size_t from,
                                   const std::vector<std::size_t>& candidates, int k) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(candidates.size());
    for (std::size_t c : candidates) {
        if (c == from)
            continue;
        dist.emplace_back((vectors[c] - vectors[from]).squaredNorm(), c);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> out;
    out.reserve(std::min<std::size_t>(k, dist.size()));
    for (std::size_t i = 0; i < dist.size() && i < static_cast<std::size_t>(k); ++i)
        out.push_back(dist[i].second);
    return out;
}

void check_smote_preconditions(const std::vector<Eigen::VectorXd>& vectors,
                               const std::vector<int>& labels, int k,
                               const ClassSplit& split) {
    if (vectors.size() != labels.size())
        throw InvalidArgument("oversample: vectors/labels size mismatch");
    if (k < 1)
        throw InvalidArgument("oversample: k must be >= 1");
    if (split.minority.size() <= static_cast<std::size_t>(k))
        throw InvalidArgument("oversample: minority count " + std::to_string(split.minority.size()) +
                              " must exceed k=" + std::to_string(k) + "; use a smaller k");
}

} // namespace

std::vector<std::size_t> random_oversample_indices(const std::vector<int>& labels,
                                                   std::uint64_t seed) {
    ClassSplit split = split_classes(labels);
    std::vector<std::size_t> indices(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        indices[i] = i;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, split.minority.size() - 1);
    for (std::size_t need = split.majority.size() - split.minority.size(); need > 0; --need)
        indices.push_back(split.minority[pick(rng)]);
    return indices;
}

OversampleResult random_oversample(const std::vector<Eigen::VectorXd>& vectors,
                                   const std::vector<int>& labels, std::uint64_t seed) {
    if (vectors.size() != labels.size())
        throw InvalidArgument("oversample: vectors/labels size mismatch");
    OversampleResult result;
    for (std::size_t i : random_oversample_indices(labels, seed)) {
        result.vectors.push_back(vectors[i]);
        result.labels.push_back(labels[i]);
    }
    return result;
}

OversampleResult smote(const std::vector<Eigen::VectorXd>& vectors, const std::vector<int>& labels,
                       int k, std::uint64_t seed) {
    ClassSplit split = split_classes(labels);
    check_smote_preconditions(vectors, labels, k, split);

    OversampleResult result;
    result.vectors = vectors;
    result.labels = labels;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t need = split.majority.size() - split.minority.size();
    for (std::size_t g = 0; g < need; ++g) {
        std::size_t base = split.minority[g % split.minority.size()];
        std::vector<std::size_t> nn = k_nearest(vectors, base, split.minority, k);
        std::uniform_int_distribution<std::size_t> pick(0, nn.size() - 1);
        std::size_t neighbor = nn[pick(rng)];
        double lambda = unit(rng);
        SyntheticPoint point{vectors[base] + lambda * (vectors[neighbor] - vectors[base]),
                             base, neighbor, lambda};
        result.vectors.push_back(point.value);
        result.labels.push_back(split.minority_label);
        result.synthetics.push_back(std::move(point));
    }
    return result;
}

OversampleResult adasyn(const std::vector<Eigen::VectorXd>& vectors, const std::vector<int>& labels,
                        int k, std::uint64_t seed, double beta) {
    ClassSplit split = split_classes(labels);
    check_smote_preconditions(vectors, labels, k, split);
    if (beta <= 0.0 || beta > 1.0)
        throw InvalidArgument("adasyn: beta must be in (0,1]");

    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        all[i] = i;

    // r_i: majority share among the k nearest neighbors in the whole dataset
    std::vector<double> ratio(split.minority.size(), 0.0);
    double ratio_sum = 0.0;
    for (std::size_t m = 0; m < split.minority.size(); ++m) {
        std::vector<std::size_t> nn = k_nearest(vectors, split.minority[m], all, k);
        std::size_t majority_nn = 0;
        for (std::size_t n : nn)
            if (labels[n] != split.minority_label)
                ++majority_nn;
        ratio[m] = static_cast<double>(majority_nn) / static_cast<double>(k);
        ratio_sum += ratio[m];
    }

    OversampleResult result;
    result.vectors = vectors;
    result.labels = labels;
    if (ratio_sum == 0.0)
        return result; // no minority point borders the majority class

    const double total = beta * static_cast<double>(split.majority.size() - split.minority.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t m = 0; m < split.minority.size(); ++m) {
        auto g_i = static_cast<std::size_t>(std::llround(total * ratio[m] / ratio_sum));
        if (g_i == 0)
            continue;
        std::size_t base = split.minority[m];
        std::vector<std::size_t> nn = k_nearest(vectors, base, split.minority, k);
        std::uniform_int_distribution<std::size_t> pick(0, nn.size() - 1);
        for (std::size_t g = 0; g < g_i; ++g) {
            std::size_t neighbor = nn[pick(rng)];
            double lambda = unit(rng);
            SyntheticPoint point{vectors[base] + lambda * (vectors[neighbor] - vectors[base]),
                                 base, neighbor, lambda};
            result.vectors.push_back(point.value);
            result.labels.push_back(split.minority_label);
            result.synthetics.push_back(std::move(point));
        }
    }
    return result;
}

} // namespace cq
