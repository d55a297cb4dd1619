#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "embed.hpp"
#include "labels.hpp"
#include "normalize.hpp"

namespace cq {

enum class Oversampler { none, random, smote, adasyn, auto_select };

std::string_view oversampler_name(Oversampler o);
Oversampler oversampler_from_name(std::string_view name);

struct TrainConfig {
    int embedding_dim = 64; // E
    int hidden_dim = 64;    // H
    int max_len = 200;
    double learning_rate = 1e-3;
    int epochs = 100;
    int patience = 10; // early-stopping patience on validation loss
    int batch_size = 32;
    std::uint64_t seed = 0;
    Oversampler oversampler = Oversampler::none;
    PositiveClass positive_class = PositiveClass::good;
    double threshold = 0.5;
    double validation_fraction = 0.1; // 0 disables early stopping
    int smote_k = 5;
    double adasyn_beta = 1.0;
    std::size_t min_vocab_freq = 1;

    void validate() const;
};

/// One direction of the recurrent layer. Gate order everywhere: input i,
/// forget f, output o, candidate g.
struct LstmCell {
    Eigen::MatrixXd w_i, w_f, w_o, w_g; // H x E
    Eigen::MatrixXd u_i, u_f, u_o, u_g; // H x H
    Eigen::VectorXd b_i, b_f, b_o, b_g; // H
};

struct LabeledExample {
    NormalizedMessage message;
    bool label = false;
};

/// Embedding table + two recurrent cells + sigmoid head. The message
/// representation is the concatenation of each direction's final hidden
/// state over the non-pad prefix.
class BiLstmModel {
public:
    Vocab vocab;
    EmbeddingTable embedding;
    LstmCell fwd, bwd;
    Eigen::VectorXd dense_w; // 2H
    double dense_b = 0.0;
    TrainConfig config;

    static BiLstmModel initialize(Vocab vocab, const TrainConfig& config);

    double probability(const NormalizedMessage& message) const;
    std::pair<double, bool> predict(const NormalizedMessage& message) const;

    /// Probability for an already-encoded id sequence.
    double probability_ids(const std::vector<int>& ids) const;
    /// Probability for a raw single-step input vector (synthetic examples).
    double probability_raw(const Eigen::VectorXd& x) const;

    int hidden_dim() const { return static_cast<int>(fwd.b_i.size()); }
    int embedding_dim() const { return embedding.dim(); }

    /// Named views over every trainable scalar, fixed order. Row 0 of the
    /// embedding is excluded (pad row stays zero).
    struct ParamView {
        std::string name;
        double* data;
        std::size_t size;
    };
    std::vector<ParamView> parameter_views();
};

/// One training input: an encoded id sequence, or a raw vector injected as a
/// single timestep (SMOTE/ADASYN synthetics).
struct TrainExample {
    std::vector<int> ids;
    Eigen::VectorXd raw;
    bool is_raw = false;
    double label = 0.0;
};

/// Gradients in the same layout as BiLstmModel::parameter_views().
struct Gradients {
    EmbeddingTable embedding;
    LstmCell fwd, bwd;
    Eigen::VectorXd dense_w;
    double dense_b = 0.0;

    static Gradients zeros_like(const BiLstmModel& model);
    std::vector<BiLstmModel::ParamView> parameter_views();
};

/// Mean binary cross-entropy over the batch.
double batch_loss(const BiLstmModel& model, const std::vector<TrainExample>& batch);

/// Analytic gradients of batch_loss w.r.t. every parameter group.
Gradients batch_gradients(const BiLstmModel& model, const std::vector<TrainExample>& batch);

struct TrainDiagnostics {
    std::vector<std::size_t> oversampled_indices; // into the input dataset
    std::size_t synthetic_count = 0;
    int epochs_run = 0;
    std::optional<double> best_validation_loss;
    Oversampler chosen_oversampler = Oversampler::none;
};

/// Train a detector on binary-labeled normalized messages. Deterministic per
/// (seed, config, data). Throws on single-class input and on non-finite loss.
BiLstmModel train(const std::vector<LabeledExample>& dataset, const TrainConfig& config,
                  TrainDiagnostics* diagnostics = nullptr);

struct GoodVerdict {
    bool good = false;
    bool missing_why = false;
    bool missing_what = false;
    double p_missing_why = 0.0;
    double p_missing_what = 0.0;
};

/// good <=> neither detector fires. Hints name the detectors that fired.
GoodVerdict compose_good(const BiLstmModel& cwhy, const BiLstmModel& cwhat,
                         const NormalizedMessage& message);

/// Self-describing JSON serialization with a leading schema version; exact
/// 64-bit round trip.
void save_model(const BiLstmModel& model, const std::string& path);
BiLstmModel load_model(const std::string& path);

std::string model_to_json(const BiLstmModel& model);
BiLstmModel model_from_json(const std::string& text);

} // namespace cq
