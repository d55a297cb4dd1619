#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace cq {

/// Finite-population sampling parameters. Defaults give a 95% confidence
/// level with a 5% margin of error under the maximum-variance assumption.
struct SampleSpec {
    double confidence_z = 1.96;
    double margin_e = 0.05;
    double proportion_p = 0.5;

    void validate() const;
};

/// Cochran's formula with finite-population correction:
/// n0 = z^2 p (1-p) / e^2, n = n0 / (1 + (n0 - 1)/N), rounded to nearest,
/// clamped to [1, N].
std::size_t cochran_sample_size(std::size_t population, const SampleSpec& spec);

struct ClusterPlan {
    std::string cluster_id;
    std::size_t population = 0;
    std::size_t sample_size = 0;
};

struct SamplePlan {
    std::vector<ClusterPlan> clusters;
    std::size_t total() const;
};

/// Per-cluster Cochran sizes for a plain list of cluster populations.
std::vector<std::size_t> clustered_sample_plan(const std::vector<std::size_t>& cluster_sizes,
                                               const SampleSpec& spec);

/// Plan for a corpus, one cluster per repo_id, clusters ordered by first
/// appearance in the corpus.
SamplePlan plan_for_corpus(const Corpus& corpus, const SampleSpec& spec);

/// Uniform sampling without replacement within each cluster, deterministic
/// per seed. Kept records preserve corpus order. Throws InvalidArgument
/// naming the cluster when a plan exceeds a cluster size.
Corpus draw_sample(const Corpus& corpus, const SamplePlan& plan, std::uint64_t seed);

struct LabelPair {
    std::string item_id;
    std::string rater_a;
    std::string rater_b;
};

/// Cohen's kappa: (p_o - p_e) / (1 - p_e). When p_e == 1 the statistic is
/// degenerate; returns 1 for perfect agreement and 0 otherwise. Throws on
/// empty input.
double cohen_kappa(const std::vector<LabelPair>& pairs);

/// LabelPair JSONL: {item_id, rater_a, rater_b}.
std::vector<LabelPair> read_label_pairs_file(const std::string& path);

} // namespace cq
