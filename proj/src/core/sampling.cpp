#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include <json.hpp>

namespace cq {

void SampleSpec::validate() const {
    if (confidence_z <= 0)
        throw InvalidArgument("SampleSpec: confidence_z must be positive");
    if (margin_e <= 0 || margin_e >= 1)
        throw InvalidArgument("SampleSpec: margin_e must be in (0,1)");
    if (proportion_p <= 0 || proportion_p >= 1)
        throw InvalidArgument("SampleSpec: proportion_p must be in (0,1)");
}

std::size_t cochran_sample_size(std::size_t population, const SampleSpec& spec) {
    if (population < 1)
        throw InvalidArgument("cochran_sample_size: population must be >= 1");
    spec.validate();
    double n0 = spec.confidence_z * spec.confidence_z * spec.proportion_p * (1.0 - spec.proportion_p) /
                (spec.margin_e * spec.margin_e);
    double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
    auto rounded = static_cast<long long>(std::llround(n));
    rounded = std::max<long long>(rounded, 1);
    rounded = std::min<long long>(rounded, static_cast<long long>(population));
    return static_cast<std::size_t>(rounded);
}

std::size_t SamplePlan::total() const {
    return std::accumulate(clusters.begin(), clusters.end(), std::size_t{0},
                           [](std::size_t acc, const ClusterPlan& c) { return acc + c.sample_size; });
}

std::vector<std::size_t> clustered_sample_plan(const std::vector<std::size_t>& cluster_sizes,
                                               const SampleSpec& spec) {
    if (cluster_sizes.empty())
        throw InvalidArgument("clustered_sample_plan: empty cluster list");
    std::vector<std::size_t> sizes;
    sizes.reserve(cluster_sizes.size());
    for (std::size_t n : cluster_sizes)
        sizes.push_back(cochran_sample_size(n, spec));
    return sizes;
}

SamplePlan plan_for_corpus(const Corpus& corpus, const SampleSpec& spec) {
    SamplePlan plan;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& rec : corpus.records) {
        auto [it, inserted] = index.emplace(rec.repo_id, plan.clusters.size());
        if (inserted)
            plan.clusters.push_back({rec.repo_id, 0, 0});
        ++plan.clusters[it->second].population;
    }
    for (auto& cluster : plan.clusters)
        cluster.sample_size = cochran_sample_size(cluster.population, spec);
    return plan;
}

Corpus draw_sample(const Corpus& corpus, const SamplePlan& plan, std::uint64_t seed) {
    // indices per cluster, in corpus order
    std::unordered_map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
        members[corpus.records[i].repo_id].push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<bool> chosen(corpus.records.size(), false);
    for (const auto& cluster : plan.clusters) {
        auto it = members.find(cluster.cluster_id);
        std::size_t available = (it == members.end()) ? 0 : it->second.size();
        if (cluster.sample_size > available)
            throw InvalidArgument("draw_sample: cluster '" + cluster.cluster_id + "' has " +
                                  std::to_string(available) + " records, plan asks for " +
                                  std::to_string(cluster.sample_size));
        // partial Fisher-Yates over the cluster's index list
        std::vector<std::size_t>& pool = it->second;
        for (std::size_t j = 0; j < cluster.sample_size; ++j) {
            std::uniform_int_distribution<std::size_t> dist(j, pool.size() - 1);
            std::swap(pool[j], pool[dist(rng)]);
            chosen[pool[j]] = true;
        }
    }

    Corpus sample;
    sample.provenance = corpus.provenance + " (sampled seed=" + std::to_string(seed) + ")";
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
        if (chosen[i])
            sample.records.push_back(corpus.records[i]);
    return sample;
}

double cohen_kappa(const std::vector<LabelPair>& pairs) {
    if (pairs.empty())
        throw InvalidArgument("cohen_kappa: empty input");
    std::map<std::string, std::size_t> marg_a;
    std::map<std::string, std::size_t> marg_b;
    std::size_t agree = 0;
    for (const auto& p : pairs) {
        ++marg_a[p.rater_a];
        ++marg_b[p.rater_b];
        if (p.rater_a == p.rater_b)
            ++agree;
    }
    const double n = static_cast<double>(pairs.size());
    const double p_o = static_cast<double>(agree) / n;
    double p_e = 0.0;
    for (const auto& [label, count_a] : marg_a) {
        auto it = marg_b.find(label);
        if (it != marg_b.end())
            p_e += (static_cast<double>(count_a) / n) * (static_cast<double>(it->second) / n);
    }
    if (p_e >= 1.0)
        return p_o >= 1.0 ? 1.0 : 0.0;
    return (p_o - p_e) / (1.0 - p_e);
}

std::vector<LabelPair> read_label_pairs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);
    std::vector<LabelPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("label pairs line " + std::to_string(line_no) + ": not valid JSON");
        try {
            pairs.push_back({j.value("item_id", ""), j.at("rater_a").get<std::string>(),
                             j.at("rater_b").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("label pairs line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return pairs;
}

} // namespace cq
