#include "bilstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "oversample.hpp"

namespace cq {

std::string_view oversampler_name(Oversampler o) {
    switch (o) {
    case Oversampler::none: return "none";
    case Oversampler::random: return "random";
    case Oversampler::smote: return "smote";
    case Oversampler::adasyn: return "adasyn";
    case Oversampler::auto_select: return "auto";
    }
    return "none";
}

Oversampler oversampler_from_name(std::string_view name) {
    if (name == "none")
        return Oversampler::none;
    if (name == "random")
        return Oversampler::random;
    if (name == "smote")
        return Oversampler::smote;
    if (name == "adasyn")
        return Oversampler::adasyn;
    if (name == "auto")
        return Oversampler::auto_select;
    throw ParseError("unknown oversampler: " + std::string(name));
}

void TrainConfig::validate() const {
    if (embedding_dim < 1 || hidden_dim < 1)
        throw InvalidArgument("TrainConfig: dimensions must be positive");
    if (max_len < 1)
        throw InvalidArgument("TrainConfig: max_len must be >= 1");
    if (learning_rate <= 0)
        throw InvalidArgument("TrainConfig: learning_rate must be positive");
    if (epochs < 0)
        throw InvalidArgument("TrainConfig: epochs must be >= 0");
    if (patience < 1)
        throw InvalidArgument("TrainConfig: patience must be >= 1");
    if (batch_size < 1)
        throw InvalidArgument("TrainConfig: batch_size must be >= 1");
    if (threshold <= 0 || threshold >= 1)
        throw InvalidArgument("TrainConfig: threshold must be in (0,1)");
    if (validation_fraction < 0 || validation_fraction >= 1)
        throw InvalidArgument("TrainConfig: validation_fraction must be in [0,1)");
    if (smote_k < 1)
        throw InvalidArgument("TrainConfig: smote_k must be >= 1");
    if (adasyn_beta <= 0 || adasyn_beta > 1)
        throw InvalidArgument("TrainConfig: adasyn_beta must be in (0,1]");
}

namespace {

Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& z) {
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Stable binary cross-entropy from the pre-sigmoid logit.
double bce_from_logit(double logit, double y) {
    return std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
}

void init_matrix(Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    m.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = dist(rng);
}

void init_vector(Eigen::VectorXd& v, Eigen::Index size, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    v.resize(size);
    for (Eigen::Index i = 0; i < size; ++i)
        v(i) = dist(rng);
}

void init_cell(LstmCell& cell, int hidden, int input, std::mt19937_64& rng) {
    init_matrix(cell.w_i, hidden, input, rng);
    init_matrix(cell.w_f, hidden, input, rng);
    init_matrix(cell.w_o, hidden, input, rng);
    init_matrix(cell.w_g, hidden, input, rng);
    init_matrix(cell.u_i, hidden, hidden, rng);
    init_matrix(cell.u_f, hidden, hidden, rng);
    init_matrix(cell.u_o, hidden, hidden, rng);
    init_matrix(cell.u_g, hidden, hidden, rng);
    init_vector(cell.b_i, hidden, rng);
    init_vector(cell.b_f, hidden, rng);
    init_vector(cell.b_o, hidden, rng);
    init_vector(cell.b_g, hidden, rng);
}

void zero_cell(LstmCell& cell, int hidden, int input) {
    cell.w_i = Eigen::MatrixXd::Zero(hidden, input);
    cell.w_f = Eigen::MatrixXd::Zero(hidden, input);
    cell.w_o = Eigen::MatrixXd::Zero(hidden, input);
    cell.w_g = Eigen::MatrixXd::Zero(hidden, input);
    cell.u_i = Eigen::MatrixXd::Zero(hidden, hidden);
    cell.u_f = Eigen::MatrixXd::Zero(hidden, hidden);
    cell.u_o = Eigen::MatrixXd::Zero(hidden, hidden);
    cell.u_g = Eigen::MatrixXd::Zero(hidden, hidden);
    cell.b_i = Eigen::VectorXd::Zero(hidden);
    cell.b_f = Eigen::VectorXd::Zero(hidden);
    cell.b_o = Eigen::VectorXd::Zero(hidden);
    cell.b_g = Eigen::VectorXd::Zero(hidden);
}

struct StepCache {
    Eigen::VectorXd x, h_prev, c_prev;
    Eigen::VectorXd i, f, o, g, c, tanh_c, h;
};

struct DirectionRun {
    std::vector<StepCache> steps; // processing order
    Eigen::VectorXd final_h;
};

DirectionRun run_direction(const LstmCell& cell, const std::vector<Eigen::VectorXd>& inputs) {
    const Eigen::Index hidden = cell.b_i.size();
    DirectionRun run;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
    run.steps.reserve(inputs.size());
    for (const auto& x : inputs) {
        StepCache s;
        s.x = x;
        s.h_prev = h;
        s.c_prev = c;
        s.i = sigmoid_vec(cell.w_i * x + cell.u_i * h + cell.b_i);
        s.f = sigmoid_vec(cell.w_f * x + cell.u_f * h + cell.b_f);
        s.o = sigmoid_vec(cell.w_o * x + cell.u_o * h + cell.b_o);
        s.g = (cell.w_g * x + cell.u_g * h + cell.b_g).array().tanh();
        s.c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
        s.tanh_c = s.c.array().tanh();
        s.h = s.o.cwiseProduct(s.tanh_c);
        h = s.h;
        c = s.c;
        run.steps.push_back(std::move(s));
    }
    run.final_h = h;
    return run;
}

/// Backprop through one direction given the loss gradient at its final
/// hidden state. Returns input gradients in processing order.
std::vector<Eigen::VectorXd> backward_direction(const LstmCell& cell, const DirectionRun& run,
                                                const Eigen::VectorXd& dh_final, LstmCell& grads) {
    const Eigen::Index hidden = cell.b_i.size();
    std::vector<Eigen::VectorXd> dx(run.steps.size());
    Eigen::VectorXd dh = dh_final;
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(hidden);
    for (std::size_t t = run.steps.size(); t-- > 0;) {
        const StepCache& s = run.steps[t];
        Eigen::ArrayXd dha = dh.array();
        Eigen::VectorXd dz_o = (dha * s.tanh_c.array() * s.o.array() * (1.0 - s.o.array())).matrix();
        dc.array() += dha * s.o.array() * (1.0 - s.tanh_c.array().square());
        Eigen::VectorXd dz_i = (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
        Eigen::VectorXd dz_g = (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();
        Eigen::VectorXd dz_f =
            (dc.array() * s.c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();

        grads.w_i += dz_i * s.x.transpose();
        grads.w_f += dz_f * s.x.transpose();
        grads.w_o += dz_o * s.x.transpose();
        grads.w_g += dz_g * s.x.transpose();
        grads.u_i += dz_i * s.h_prev.transpose();
        grads.u_f += dz_f * s.h_prev.transpose();
        grads.u_o += dz_o * s.h_prev.transpose();
        grads.u_g += dz_g * s.h_prev.transpose();
        grads.b_i += dz_i;
        grads.b_f += dz_f;
        grads.b_o += dz_o;
        grads.b_g += dz_g;

        dx[t] = cell.w_i.transpose() * dz_i + cell.w_f.transpose() * dz_f +
                cell.w_o.transpose() * dz_o + cell.w_g.transpose() * dz_g;
        dh = cell.u_i.transpose() * dz_i + cell.u_f.transpose() * dz_f +
             cell.u_o.transpose() * dz_o + cell.u_g.transpose() * dz_g;
        dc = dc.cwiseProduct(s.f);
    }
    return dx;
}

std::vector<Eigen::VectorXd> example_inputs(const BiLstmModel& model, const TrainExample& ex) {
    std::vector<Eigen::VectorXd> xs;
    if (ex.is_raw) {
        xs.push_back(ex.raw);
        return xs;
    }
    for (int id : ex.ids) {
        if (id == Vocab::pad_id)
            break;
        if (id < 0 || id >= model.embedding.vocab_size())
            throw InvalidArgument("bilstm: token id out of range: " + std::to_string(id));
        xs.push_back(model.embedding.weights.row(id).transpose());
    }
    return xs;
}

struct ForwardResult {
    DirectionRun fwd, bwd;
    Eigen::VectorXd rep; // 2H
    double logit = 0.0;
    double p = 0.5;
};

ForwardResult forward_example(const BiLstmModel& model, const std::vector<Eigen::VectorXd>& xs) {
    const int hidden = model.hidden_dim();
    ForwardResult r;
    r.fwd = run_direction(model.fwd, xs);
    std::vector<Eigen::VectorXd> rev(xs.rbegin(), xs.rend());
    r.bwd = run_direction(model.bwd, rev);
    r.rep = Eigen::VectorXd::Zero(2 * hidden);
    if (!xs.empty()) {
        r.rep.head(hidden) = r.fwd.final_h;
        r.rep.tail(hidden) = r.bwd.final_h;
    }
    r.logit = model.dense_w.dot(r.rep) + model.dense_b;
    r.p = sigmoid(r.logit);
    return r;
}

} // namespace

BiLstmModel BiLstmModel::initialize(Vocab vocab, const TrainConfig& config) {
    config.validate();
    BiLstmModel model;
    model.config = config;
    model.vocab = std::move(vocab);
    std::mt19937_64 rng(config.seed);
    model.embedding = init_embedding(model.vocab.size(), config.embedding_dim, rng());
    init_cell(model.fwd, config.hidden_dim, config.embedding_dim, rng);
    init_cell(model.bwd, config.hidden_dim, config.embedding_dim, rng);
    init_vector(model.dense_w, 2 * config.hidden_dim, rng);
    model.dense_b = 0.0;
    return model;
}

double BiLstmModel::probability_ids(const std::vector<int>& ids) const {
    TrainExample ex;
    ex.ids = ids;
    return forward_example(*this, example_inputs(*this, ex)).p;
}

double BiLstmModel::probability_raw(const Eigen::VectorXd& x) const {
    TrainExample ex;
    ex.raw = x;
    ex.is_raw = true;
    return forward_example(*this, example_inputs(*this, ex)).p;
}

double BiLstmModel::probability(const NormalizedMessage& message) const {
    return probability_ids(encode(message.tokens, vocab, config.max_len));
}

std::pair<double, bool> BiLstmModel::predict(const NormalizedMessage& message) const {
    double p = probability(message);
    return {p, p >= config.threshold};
}

namespace {

void cell_views(const std::string& prefix, LstmCell& cell,
                std::vector<BiLstmModel::ParamView>& views) {
    auto add_m = [&](const char* name, Eigen::MatrixXd& m) {
        views.push_back({prefix + name, m.data(), static_cast<std::size_t>(m.size())});
    };
    auto add_v = [&](const char* name, Eigen::VectorXd& v) {
        views.push_back({prefix + name, v.data(), static_cast<std::size_t>(v.size())});
    };
    add_m("w_i", cell.w_i);
    add_m("w_f", cell.w_f);
    add_m("w_o", cell.w_o);
    add_m("w_g", cell.w_g);
    add_m("u_i", cell.u_i);
    add_m("u_f", cell.u_f);
    add_m("u_o", cell.u_o);
    add_m("u_g", cell.u_g);
    add_v("b_i", cell.b_i);
    add_v("b_f", cell.b_f);
    add_v("b_o", cell.b_o);
    add_v("b_g", cell.b_g);
}

} // namespace

std::vector<BiLstmModel::ParamView> BiLstmModel::parameter_views() {
    std::vector<ParamView> views;
    views.push_back({"embedding", embedding.weights.data(),
                     static_cast<std::size_t>(embedding.weights.size())});
    cell_views("fwd.", fwd, views);
    cell_views("bwd.", bwd, views);
    views.push_back({"dense_w", dense_w.data(), static_cast<std::size_t>(dense_w.size())});
    views.push_back({"dense_b", &dense_b, 1});
    return views;
}

Gradients Gradients::zeros_like(const BiLstmModel& model) {
    Gradients g;
    g.embedding.weights =
        Eigen::MatrixXd::Zero(model.embedding.weights.rows(), model.embedding.weights.cols());
    zero_cell(g.fwd, model.hidden_dim(), model.embedding_dim());
    zero_cell(g.bwd, model.hidden_dim(), model.embedding_dim());
    g.dense_w = Eigen::VectorXd::Zero(model.dense_w.size());
    g.dense_b = 0.0;
    return g;
}

std::vector<BiLstmModel::ParamView> Gradients::parameter_views() {
    std::vector<BiLstmModel::ParamView> views;
    views.push_back({"embedding", embedding.weights.data(),
                     static_cast<std::size_t>(embedding.weights.size())});
    cell_views("fwd.", fwd, views);
    cell_views("bwd.", bwd, views);
    views.push_back({"dense_w", dense_w.data(), static_cast<std::size_t>(dense_w.size())});
    views.push_back({"dense_b", &dense_b, 1});
    return views;
}

double batch_loss(const BiLstmModel& model, const std::vector<TrainExample>& batch) {
    if (batch.empty())
        throw InvalidArgument("batch_loss: empty batch");
    double total = 0.0;
    for (const auto& ex : batch) {
        ForwardResult r = forward_example(model, example_inputs(model, ex));
        total += bce_from_logit(r.logit, ex.label);
    }
    return total / static_cast<double>(batch.size());
}

namespace {

double batch_backward(const BiLstmModel& model, const std::vector<TrainExample>& batch,
                      Gradients& grads) {
    const int hidden = model.hidden_dim();
    const double scale = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (const auto& ex : batch) {
        std::vector<Eigen::VectorXd> xs = example_inputs(model, ex);
        ForwardResult r = forward_example(model, xs);
        total += bce_from_logit(r.logit, ex.label);

        const double dlogit = (r.p - ex.label) * scale;
        grads.dense_w += dlogit * r.rep;
        grads.dense_b += dlogit;
        if (xs.empty())
            continue;

        Eigen::VectorXd drep = dlogit * model.dense_w;
        std::vector<Eigen::VectorXd> dx_fwd =
            backward_direction(model.fwd, r.fwd, drep.head(hidden), grads.fwd);
        std::vector<Eigen::VectorXd> dx_bwd =
            backward_direction(model.bwd, r.bwd, drep.tail(hidden), grads.bwd);

        if (!ex.is_raw) {
            const std::size_t n = xs.size();
            for (std::size_t t = 0; t < n; ++t) {
                Eigen::VectorXd dx = dx_fwd[t] + dx_bwd[n - 1 - t];
                grads.embedding.weights.row(ex.ids[t]) += dx.transpose();
            }
        }
    }
    return total * scale;
}

} // namespace

Gradients batch_gradients(const BiLstmModel& model, const std::vector<TrainExample>& batch) {
    if (batch.empty())
        throw InvalidArgument("batch_gradients: empty batch");
    Gradients grads = Gradients::zeros_like(model);
    batch_backward(model, batch, grads);
    return grads;
}

namespace {

/// Adaptive-moment gradient descent, fixed coefficients (0.9, 0.999, 1e-8).
class AdamOptimizer {
public:
    AdamOptimizer(BiLstmModel& model, double lr) : lr_(lr) {
        auto views = model.parameter_views();
        for (const auto& v : views) {
            m_.emplace_back(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(v.size)));
            v_.emplace_back(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(v.size)));
        }
    }

    void step(BiLstmModel& model, Gradients& grads) {
        ++t_;
        auto params = model.parameter_views();
        auto gviews = grads.parameter_views();
        const double bc1 = 1.0 - std::pow(0.9, t_);
        const double bc2 = 1.0 - std::pow(0.999, t_);
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto n = static_cast<Eigen::Index>(params[i].size);
            Eigen::Map<Eigen::ArrayXd> p(params[i].data, n);
            Eigen::Map<const Eigen::ArrayXd> g(gviews[i].data, n);
            m_[i] = 0.9 * m_[i] + 0.1 * g;
            v_[i] = 0.999 * v_[i] + 0.001 * g.square();
            p -= lr_ * (m_[i] / bc1) / ((v_[i] / bc2).sqrt() + 1e-8);
        }
    }

private:
    double lr_;
    long t_ = 0;
    std::vector<Eigen::ArrayXd> m_, v_;
};

struct PreparedData {
    std::vector<TrainExample> train;
    std::vector<TrainExample> validation;
    std::vector<std::size_t> oversampled_indices; // into the caller's dataset
    std::size_t synthetic_count = 0;
};

std::vector<TrainExample> encode_subset(const std::vector<LabeledExample>& dataset,
                                        const std::vector<std::size_t>& indices, const Vocab& vocab,
                                        int max_len) {
    std::vector<TrainExample> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        TrainExample ex;
        ex.ids = encode(dataset[i].message.tokens, vocab, max_len);
        ex.label = dataset[i].label ? 1.0 : 0.0;
        out.push_back(std::move(ex));
    }
    return out;
}

PreparedData prepare_data(const std::vector<LabeledExample>& dataset,
                          const std::vector<std::size_t>& train_idx,
                          const std::vector<std::size_t>& val_idx, const Vocab& vocab,
                          const EmbeddingTable& embedding, const TrainConfig& config,
                          Oversampler oversampler, std::uint64_t oversample_seed) {
    PreparedData data;
    data.validation = encode_subset(dataset, val_idx, vocab, config.max_len);

    std::vector<int> labels;
    labels.reserve(train_idx.size());
    for (std::size_t i : train_idx)
        labels.push_back(dataset[i].label ? 1 : 0);

    switch (oversampler) {
    case Oversampler::none: {
        data.train = encode_subset(dataset, train_idx, vocab, config.max_len);
        break;
    }
    case Oversampler::random: {
        std::vector<std::size_t> local = random_oversample_indices(labels, oversample_seed);
        std::vector<std::size_t> global;
        global.reserve(local.size());
        for (std::size_t l : local)
            global.push_back(train_idx[l]);
        data.train = encode_subset(dataset, global, vocab, config.max_len);
        data.oversampled_indices = std::move(global);
        break;
    }
    case Oversampler::smote:
    case Oversampler::adasyn: {
        data.train = encode_subset(dataset, train_idx, vocab, config.max_len);
        std::vector<Eigen::VectorXd> pooled;
        pooled.reserve(data.train.size());
        for (const auto& ex : data.train)
            pooled.push_back(mean_pool(ex.ids, embedding));
        OversampleResult result =
            oversampler == Oversampler::smote
                ? smote(pooled, labels, config.smote_k, oversample_seed)
                : adasyn(pooled, labels, config.smote_k, oversample_seed, config.adasyn_beta);
        for (const auto& synth : result.synthetics) {
            TrainExample ex;
            ex.raw = synth.value;
            ex.is_raw = true;
            ex.label = result.labels[labels.size() + (&synth - result.synthetics.data())];
            data.train.push_back(std::move(ex));
            // parents of synthetics are the oversampled originals
            data.oversampled_indices.push_back(train_idx[synth.parent_base]);
        }
        data.synthetic_count = result.synthetics.size();
        break;
    }
    case Oversampler::auto_select:
        throw InvalidArgument("prepare_data: auto oversampler must be resolved by the caller");
    }
    return data;
}

struct Snapshot {
    Eigen::MatrixXd embedding;
    LstmCell fwd, bwd;
    Eigen::VectorXd dense_w;
    double dense_b = 0.0;
};

Snapshot take_snapshot(const BiLstmModel& model) {
    return {model.embedding.weights, model.fwd, model.bwd, model.dense_w, model.dense_b};
}

void restore_snapshot(BiLstmModel& model, const Snapshot& snap) {
    model.embedding.weights = snap.embedding;
    model.fwd = snap.fwd;
    model.bwd = snap.bwd;
    model.dense_w = snap.dense_w;
    model.dense_b = snap.dense_b;
}

BiLstmModel train_single(const std::vector<LabeledExample>& dataset,
                         const std::vector<std::size_t>& train_idx,
                         const std::vector<std::size_t>& val_idx, const Vocab& vocab,
                         const TrainConfig& config, Oversampler oversampler,
                         TrainDiagnostics* diagnostics) {
    TrainConfig effective = config;
    effective.oversampler = oversampler;
    BiLstmModel model = BiLstmModel::initialize(vocab, effective);

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    PreparedData data = prepare_data(dataset, train_idx, val_idx, vocab, model.embedding, config,
                                     oversampler, rng());

    if (diagnostics) {
        diagnostics->oversampled_indices = data.oversampled_indices;
        diagnostics->synthetic_count = data.synthetic_count;
        diagnostics->chosen_oversampler = oversampler;
    }

    AdamOptimizer adam(model, config.learning_rate);
    std::vector<std::size_t> order(data.train.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    const bool use_early_stop = !data.validation.empty();
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    Snapshot best_snapshot = take_snapshot(model);
    int epochs_run = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t stop = std::min(order.size(), start + config.batch_size);
            std::vector<TrainExample> batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i)
                batch.push_back(data.train[order[i]]);
            Gradients grads = Gradients::zeros_like(model);
            double loss = batch_backward(model, batch, grads);
            if (!std::isfinite(loss))
                throw Error("train: non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                            std::to_string(start / config.batch_size));
            adam.step(model, grads);
        }
        ++epochs_run;
        if (use_early_stop) {
            double val_loss = batch_loss(model, data.validation);
            if (val_loss < best_val) {
                best_val = val_loss;
                since_best = 0;
                best_snapshot = take_snapshot(model);
            } else if (++since_best >= config.patience) {
                restore_snapshot(model, best_snapshot);
                break;
            }
        }
    }
    if (use_early_stop && epochs_run == config.epochs && std::isfinite(best_val))
        restore_snapshot(model, best_snapshot);

    if (diagnostics) {
        diagnostics->epochs_run = epochs_run;
        if (use_early_stop && std::isfinite(best_val))
            diagnostics->best_validation_loss = best_val;
    }
    return model;
}

double validation_accuracy(const BiLstmModel& model, const std::vector<TrainExample>& validation) {
    if (validation.empty())
        return 0.0;
    std::size_t correct = 0;
    for (const auto& ex : validation) {
        double p = model.probability_ids(ex.ids);
        bool predicted = p >= model.config.threshold;
        if (predicted == (ex.label > 0.5))
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(validation.size());
}

} // namespace

BiLstmModel train(const std::vector<LabeledExample>& dataset, const TrainConfig& config,
                  TrainDiagnostics* diagnostics) {
    config.validate();
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        (dataset[i].label ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw InvalidArgument("train: dataset must contain both classes");

    // stratified validation split
    std::mt19937_64 rng(config.seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    auto val_count = [&](std::size_t n) {
        auto take = static_cast<std::size_t>(std::floor(config.validation_fraction *
                                                        static_cast<double>(n)));
        return std::min(take, n - 1); // keep at least one per class in training
    };
    std::vector<std::size_t> train_idx, val_idx;
    std::size_t vp = val_count(pos.size());
    std::size_t vn = val_count(neg.size());
    val_idx.insert(val_idx.end(), pos.begin(), pos.begin() + vp);
    val_idx.insert(val_idx.end(), neg.begin(), neg.begin() + vn);
    train_idx.insert(train_idx.end(), pos.begin() + vp, pos.end());
    train_idx.insert(train_idx.end(), neg.begin() + vn, neg.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());

    std::vector<NormalizedMessage> train_messages;
    train_messages.reserve(train_idx.size());
    for (std::size_t i : train_idx)
        train_messages.push_back(dataset[i].message);
    Vocab vocab = build_vocab(train_messages, config.min_vocab_freq);

    if (config.oversampler != Oversampler::auto_select)
        return train_single(dataset, train_idx, val_idx, vocab, config, config.oversampler,
                            diagnostics);

    if (val_idx.empty())
        throw InvalidArgument("train: oversampler=auto needs validation_fraction > 0");
    std::vector<TrainExample> validation = encode_subset(dataset, val_idx, vocab, config.max_len);
    const Oversampler candidates[] = {Oversampler::random, Oversampler::smote, Oversampler::adasyn};
    std::optional<BiLstmModel> best;
    TrainDiagnostics best_diag;
    double best_acc = -1.0;
    for (Oversampler candidate : candidates) {
        TrainDiagnostics diag;
        BiLstmModel model =
            train_single(dataset, train_idx, val_idx, vocab, config, candidate, &diag);
        double acc = validation_accuracy(model, validation);
        if (acc > best_acc) {
            best_acc = acc;
            best = std::move(model);
            best_diag = std::move(diag);
        }
    }
    if (diagnostics)
        *diagnostics = best_diag;
    return *best;
}

GoodVerdict compose_good(const BiLstmModel& cwhy, const BiLstmModel& cwhat,
                         const NormalizedMessage& message) {
    GoodVerdict verdict;
    auto [p_why, why_fired] = cwhy.predict(message);
    auto [p_what, what_fired] = cwhat.predict(message);
    verdict.p_missing_why = p_why;
    verdict.p_missing_what = p_what;
    verdict.missing_why = why_fired;
    verdict.missing_what = what_fired;
    verdict.good = !why_fired && !what_fired;
    return verdict;
}

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "commitqual-bilstm";

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw CorruptError("model: expected a non-empty matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols)
            throw CorruptError("model: ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j[r][c].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = j[i].get<double>();
    return v;
}

nlohmann::json cell_to_json(const LstmCell& cell) {
    return nlohmann::json{
        {"w_i", matrix_to_json(cell.w_i)}, {"w_f", matrix_to_json(cell.w_f)},
        {"w_o", matrix_to_json(cell.w_o)}, {"w_g", matrix_to_json(cell.w_g)},
        {"u_i", matrix_to_json(cell.u_i)}, {"u_f", matrix_to_json(cell.u_f)},
        {"u_o", matrix_to_json(cell.u_o)}, {"u_g", matrix_to_json(cell.u_g)},
        {"b_i", vector_to_json(cell.b_i)}, {"b_f", vector_to_json(cell.b_f)},
        {"b_o", vector_to_json(cell.b_o)}, {"b_g", vector_to_json(cell.b_g)},
    };
}

LstmCell cell_from_json(const nlohmann::json& j) {
    LstmCell cell;
    cell.w_i = matrix_from_json(j.at("w_i"));
    cell.w_f = matrix_from_json(j.at("w_f"));
    cell.w_o = matrix_from_json(j.at("w_o"));
    cell.w_g = matrix_from_json(j.at("w_g"));
    cell.u_i = matrix_from_json(j.at("u_i"));
    cell.u_f = matrix_from_json(j.at("u_f"));
    cell.u_o = matrix_from_json(j.at("u_o"));
    cell.u_g = matrix_from_json(j.at("u_g"));
    cell.b_i = vector_from_json(j.at("b_i"));
    cell.b_f = vector_from_json(j.at("b_f"));
    cell.b_o = vector_from_json(j.at("b_o"));
    cell.b_g = vector_from_json(j.at("b_g"));
    return cell;
}

nlohmann::json config_to_json(const TrainConfig& config) {
    return nlohmann::json{
        {"embedding_dim", config.embedding_dim},
        {"hidden_dim", config.hidden_dim},
        {"max_len", config.max_len},
        {"learning_rate", config.learning_rate},
        {"epochs", config.epochs},
        {"patience", config.patience},
        {"batch_size", config.batch_size},
        {"seed", config.seed},
        {"oversampler", std::string(oversampler_name(config.oversampler))},
        {"positive_class", std::string(positive_class_name(config.positive_class))},
        {"threshold", config.threshold},
        {"validation_fraction", config.validation_fraction},
        {"smote_k", config.smote_k},
        {"adasyn_beta", config.adasyn_beta},
        {"min_vocab_freq", config.min_vocab_freq},
    };
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig config;
    config.embedding_dim = j.at("embedding_dim").get<int>();
    config.hidden_dim = j.at("hidden_dim").get<int>();
    config.max_len = j.at("max_len").get<int>();
    config.learning_rate = j.at("learning_rate").get<double>();
    config.epochs = j.at("epochs").get<int>();
    config.patience = j.at("patience").get<int>();
    config.batch_size = j.at("batch_size").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.oversampler = oversampler_from_name(j.at("oversampler").get<std::string>());
    config.positive_class = positive_class_from_name(j.at("positive_class").get<std::string>());
    config.threshold = j.at("threshold").get<double>();
    config.validation_fraction = j.at("validation_fraction").get<double>();
    config.smote_k = j.at("smote_k").get<int>();
    config.adasyn_beta = j.at("adasyn_beta").get<double>();
    config.min_vocab_freq = j.at("min_vocab_freq").get<std::size_t>();
    return config;
}

} // namespace

std::string model_to_json(const BiLstmModel& model) {
    nlohmann::json j{
        {"format", kFormatName},
        {"format_version", kFormatVersion},
        {"config", config_to_json(model.config)},
        {"vocab", model.vocab.id_to_token},
        {"weights",
         nlohmann::json{
             {"embedding", matrix_to_json(model.embedding.weights)},
             {"fwd", cell_to_json(model.fwd)},
             {"bwd", cell_to_json(model.bwd)},
             {"dense_w", vector_to_json(model.dense_w)},
             {"dense_b", model.dense_b},
         }},
    };
    return j.dump();
}

BiLstmModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw CorruptError("model: not valid JSON");
    if (j.value("format", "") != kFormatName)
        throw CorruptError("model: unrecognized format tag");
    int version = j.value("format_version", -1);
    if (version != kFormatVersion)
        throw VersionError("model: unsupported format version " + std::to_string(version) +
                           " (expected " + std::to_string(kFormatVersion) + ")");
    try {
        BiLstmModel model;
        model.config = config_from_json(j.at("config"));
        model.vocab.id_to_token = j.at("vocab").get<std::vector<std::string>>();
        for (std::size_t i = 0; i < model.vocab.id_to_token.size(); ++i)
            model.vocab.token_to_id.emplace(model.vocab.id_to_token[i], static_cast<int>(i));
        const auto& w = j.at("weights");
        model.embedding.weights = matrix_from_json(w.at("embedding"));
        model.fwd = cell_from_json(w.at("fwd"));
        model.bwd = cell_from_json(w.at("bwd"));
        model.dense_w = vector_from_json(w.at("dense_w"));
        model.dense_b = w.at("dense_b").get<double>();

        const auto hidden = model.fwd.b_i.size();
        if (model.embedding.weights.rows() != static_cast<Eigen::Index>(model.vocab.id_to_token.size()) ||
            model.dense_w.size() != 2 * hidden || model.bwd.b_i.size() != hidden)
            throw CorruptError("model: inconsistent tensor shapes");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptError(std::string("model: damaged payload: ") + e.what());
    }
}

void save_model(const BiLstmModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    out << model_to_json(model) << '\n';
    if (!out)
        throw IoError("write failed: " + path);
}

BiLstmModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace cq
