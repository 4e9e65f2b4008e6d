#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "deepgraph/errors.hpp"
#include "deepgraph/nn.hpp"
#include "deepgraph/rng.hpp"

namespace deepgraph::nn {

// Adam with the usual defaults and bias correction.
struct AdamState {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t step_count = 0;
    std::vector<Matrix> m, v;

    void init(const std::vector<Matrix*>& params) {
        step_count = 0;
        m.clear();
        v.clear();
        for (const Matrix* p : params) {
            m.emplace_back(p->rows, p->cols, 0.0);
            v.emplace_back(p->rows, p->cols, 0.0);
        }
    }
};

inline void adam_step(AdamState& state, const std::vector<Matrix*>& params,
                      const std::vector<Matrix>& grads) {
    if (params.size() != state.m.size() || params.size() != grads.size())
        throw ConfigError("adam_step: parameter/state shape mismatch");
    ++state.step_count;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& theta = params[p]->data;
        auto& m = state.m[p].data;
        auto& v = state.v[p].data;
        const auto& g = grads[p].data;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            theta[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

struct TrainConfig {
    double learning_rate = 0.005;
    double l2 = 1e-5;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 500;
    std::size_t patience = 20;
    std::uint64_t seed = 0;
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_mse = 0.0;  // running mean of mini-batch MSE (train mode)
    double val_mse = 0.0;    // eval mode, full validation set
};

struct TrainResult {
    Model model;  // parameters restored to the best-validation epoch
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
    double best_val_mse = 0.0;
};

// Eval-mode MSE over a set, processed in fixed-size chunks.
inline double eval_mse(const Model& model, const std::vector<Matrix>& xs,
                       const std::vector<double>& ys, std::size_t chunk = 256) {
    if (xs.size() != ys.size() || xs.empty()) throw ConfigError("eval_mse: bad input sizes");
    BatchCache cache;
    double sum = 0.0;
    for (std::size_t start = 0; start < xs.size(); start += chunk) {
        const std::size_t stop = std::min(xs.size(), start + chunk);
        std::vector<const Matrix*> ptrs;
        ptrs.reserve(stop - start);
        for (std::size_t i = start; i < stop; ++i) ptrs.push_back(&xs[i]);
        const auto yhat = forward_batch(model, ptrs, Mode::kEval, nullptr, cache);
        for (std::size_t i = start; i < stop; ++i) {
            const double d = yhat[i - start] - ys[i];
            sum += d * d;
        }
    }
    return sum / static_cast<double>(xs.size());
}

inline std::vector<double> predict(const Model& model, const std::vector<Matrix>& xs,
                                   std::size_t chunk = 256) {
    BatchCache cache;
    std::vector<double> out;
    out.reserve(xs.size());
    for (std::size_t start = 0; start < xs.size(); start += chunk) {
        const std::size_t stop = std::min(xs.size(), start + chunk);
        std::vector<const Matrix*> ptrs;
        for (std::size_t i = start; i < stop; ++i) ptrs.push_back(&xs[i]);
        const auto yhat = forward_batch(model, ptrs, Mode::kEval, nullptr, cache);
        out.insert(out.end(), yhat.begin(), yhat.end());
    }
    return out;
}

// Mini-batch Adam with seeded shuffling. Validation MSE is computed in eval
// mode after every epoch; the returned model is the snapshot with the best
// validation MSE. Stops after `patience` epochs without improvement. The
// whole run is single-threaded and bit-reproducible for a fixed seed.
inline TrainResult train(const std::vector<Matrix>& train_x, const std::vector<double>& train_y,
                         const std::vector<Matrix>& val_x, const std::vector<double>& val_y,
                         const ModelConfig& mcfg, const TrainConfig& tcfg) {
    if (train_x.empty() || train_x.size() != train_y.size())
        throw ConfigError("train: empty or inconsistent training set");
    if (val_x.empty() || val_x.size() != val_y.size())
        throw ConfigError("train: empty or inconsistent validation set");

    Rng init_rng(derive_seed(tcfg.seed, "init"));
    Rng order_rng(derive_seed(tcfg.seed, "shuffle"));
    Rng dropout_rng(derive_seed(tcfg.seed, "dropout"));

    TrainResult result;
    result.model = build_model(mcfg, init_rng);
    Model& model = result.model;

    auto params = model.params();
    AdamState adam;
    adam.learning_rate = tcfg.learning_rate;
    adam.init(params);

    std::vector<Matrix> best_params;
    for (const Matrix* p : params) best_params.push_back(*p);
    result.best_val_mse = eval_mse(model, val_x, val_y);
    result.best_epoch = 0;

    std::vector<std::size_t> order(train_x.size());
    std::iota(order.begin(), order.end(), 0);

    BatchCache cache;
    std::vector<Matrix> grads;
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= tcfg.max_epochs; ++epoch) {
        order_rng.shuffle(order);
        double epoch_sqerr = 0.0;
        for (std::size_t start = 0; start < order.size(); start += tcfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + tcfg.batch_size);
            std::vector<const Matrix*> batch_x;
            std::vector<double> batch_y;
            batch_x.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                batch_x.push_back(&train_x[order[i]]);
                batch_y.push_back(train_y[order[i]]);
            }
            const auto yhat = forward_batch(model, batch_x, Mode::kTrain, &dropout_rng, cache);
            const double batch_mse = mse_of(yhat, batch_y);
            if (!std::isfinite(batch_mse))
                throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                     ", batch starting " + std::to_string(start) +
                                     " (lr=" + std::to_string(tcfg.learning_rate) + ")");
            epoch_sqerr += batch_mse * static_cast<double>(stop - start);
            backward_batch(model, cache, batch_y, tcfg.l2, grads);
            adam_step(adam, params, grads);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = epoch_sqerr / static_cast<double>(order.size());
        stats.val_mse = eval_mse(model, val_x, val_y);
        result.history.push_back(stats);

        if (stats.val_mse < result.best_val_mse) {
            result.best_val_mse = stats.val_mse;
            result.best_epoch = epoch;
            for (std::size_t p = 0; p < params.size(); ++p) best_params[p] = *params[p];
            since_best = 0;
        } else {
            ++since_best;
            if (since_best >= tcfg.patience) break;
        }
    }

    for (std::size_t p = 0; p < params.size(); ++p) *params[p] = best_params[p];
    return result;
}

}  // namespace deepgraph::nn
