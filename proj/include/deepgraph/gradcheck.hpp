#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "deepgraph/nn.hpp"
#include "deepgraph/rng.hpp"

namespace deepgraph::nn {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::vector<std::pair<std::string, double>> per_group;  // param name -> max rel error
};

// Central finite differences against backward_batch over every parameter of a
// model built from cfg, on a random batch. with_dropout fixes one set of
// dropout masks and reuses it for both the analytic pass and every
// perturbed forward evaluation, so the compared function is identical.
inline GradCheckReport check_gradients(const ModelConfig& cfg, std::size_t batch, double l2,
                                       std::uint64_t seed, bool with_dropout = false,
                                       double h = 1e-5) {
    Rng rng(seed);
    Model model = build_model(cfg, rng);
    std::vector<Matrix> inputs;
    std::vector<const Matrix*> input_ptrs;
    std::vector<double> targets;
    for (std::size_t i = 0; i < batch; ++i) {
        Matrix x(cfg.bins, cfg.steps);
        for (double& v : x.data) v = rng.normal();
        inputs.push_back(std::move(x));
        targets.push_back(rng.normal());
    }
    for (const auto& x : inputs) input_ptrs.push_back(&x);

    BatchCache cache;
    Mode mode = Mode::kEval;
    if (with_dropout) {
        // draw masks once via a throwaway train-mode pass, then freeze them
        Rng mask_rng(derive_seed(seed, "masks"));
        forward_batch(model, input_ptrs, Mode::kTrain, &mask_rng, cache);
        mode = Mode::kTrainFixedMasks;
    }
    forward_batch(model, input_ptrs, mode, nullptr, cache);
    std::vector<Matrix> analytic;
    backward_batch(model, cache, targets, l2, analytic);

    const auto loss_at = [&]() {
        BatchCache c2;
        if (with_dropout) {
            c2.mask1 = cache.mask1;
            c2.mask2 = cache.mask2;
        }
        return batch_loss(model, input_ptrs, targets, l2, mode, nullptr, c2);
    };

    GradCheckReport report;
    auto params = model.params();
    const auto names = model.param_names();
    for (std::size_t p = 0; p < params.size(); ++p) {
        double group_err = 0.0;
        for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
            double& theta = params[p]->data[i];
            const double saved = theta;
            theta = saved + h;
            const double lp = loss_at();
            theta = saved - h;
            const double lm = loss_at();
            theta = saved;
            const double fd = (lp - lm) / (2.0 * h);
            const double an = analytic[p].data[i];
            const double denom = std::max({std::abs(fd), std::abs(an), 1e-6});
            group_err = std::max(group_err, std::abs(fd - an) / denom);
        }
        report.per_group.emplace_back(names[p], group_err);
        report.max_rel_error = std::max(report.max_rel_error, group_err);
    }
    return report;
}

}  // namespace deepgraph::nn
