#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "advdiff/neural.hpp"

namespace advdiff {

inline constexpr double kDefaultLearningRate = 0.00125;

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long t = 0;
    double lr = kDefaultLearningRate;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;

    static AdamState fresh(Eigen::Index parameter_count, double lr = kDefaultLearningRate);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads);

struct EpochRecord {
    long epoch = 0;
    double total = 0.0;
    std::vector<LossComponent> components;
    double seconds = 0.0;
};

struct TrainingHistory {
    std::vector<EpochRecord> records;
};

using LossEvaluator = std::function<LossReport(const MlpNetwork&)>;

struct TrainResult {
    MlpNetwork net;
    TrainingHistory history;
};

/// Full-batch Adam for `epochs` steps. Epoch e (1-based) records the loss of
/// the parameters before its update. Records every `log_every` epochs plus
/// the first and last. Throws NonFiniteError on a NaN/Inf loss or parameter.
TrainResult train(MlpNetwork net, const LossEvaluator& loss, long epochs, AdamState adam,
                  long log_every);

} // namespace advdiff
