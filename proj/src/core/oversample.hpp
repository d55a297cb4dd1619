#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "error.hpp"

namespace cq {

/// Indices of the balanced multiset: all original indices followed by
/// replacement draws from the minority class until the class counts are
/// equal. Majority examples are untouched. Throws on single-class input.
std::vector<std::size_t> random_oversample_indices(const std::vector<int>& labels,
                                                   std::uint64_t seed);

struct SyntheticPoint {
    Eigen::VectorXd value;
    std::size_t parent_base;     // index into the input vectors
    std::size_t parent_neighbor; // index into the input vectors
    double lambda;
};

struct OversampleResult {
    std::vector<Eigen::VectorXd> vectors; // originals followed by synthetics
    std::vector<int> labels;
    std::vector<SyntheticPoint> synthetics;
};

/// Balanced lists via random minority resampling (vector form of
/// random_oversample_indices).
OversampleResult random_oversample(const std::vector<Eigen::VectorXd>& vectors,
                                   const std::vector<int>& labels, std::uint64_t seed);

/// SMOTE: each synthetic point is x + lambda (x_nn - x) with lambda uniform
/// in [0,1], x a minority point (cycled in order) and x_nn one of its k
/// nearest minority neighbors by Euclidean distance. Generates
/// majority - minority points. Requires minority count > k >= 1.
OversampleResult smote(const std::vector<Eigen::VectorXd>& vectors, const std::vector<int>& labels,
                       int k, std::uint64_t seed);

/// ADASYN: G = beta (majority - minority) synthetic points, allocated per
/// minority point i proportionally to r_i = (majority neighbors among its k
/// nearest overall) / k; g_i = round(G r_i / sum r). Interpolation as in
/// SMOTE. All-zero r yields zero synthetics.
OversampleResult adasyn(const std::vector<Eigen::VectorXd>& vectors, const std::vector<int>& labels,
                        int k, std::uint64_t seed, double beta = 1.0);

} // namespace cq
