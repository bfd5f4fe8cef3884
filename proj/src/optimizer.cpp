#include "advdiff/optimizer.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "advdiff/errors.hpp"

namespace advdiff {

AdamState AdamState::fresh(Eigen::Index parameter_count, double lr) {
    AdamState s;
    s.m = Eigen::VectorXd::Zero(parameter_count);
    s.v = Eigen::VectorXd::Zero(parameter_count);
    s.lr = lr;
    return s;
}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grads) {
    if (grads.size() != params.size() || state.m.size() != params.size() ||
        state.v.size() != params.size()) {
        throw InvalidArgumentError("Adam state, parameters and gradient lengths differ");
    }
    if (!grads.allFinite()) {
        throw NonFiniteError(fmt::format("non-finite gradient at Adam step {}", state.t + 1),
                             state.t + 1);
    }
    state.t += 1;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    params.array() -= state.lr * (state.m.array() / c1) /
                      ((state.v.array() / c2).sqrt() + state.eps_adam);
}

TrainResult train(MlpNetwork net, const LossEvaluator& loss, long epochs, AdamState adam,
                  long log_every) {
    if (epochs < 1) {
        throw InvalidArgumentError("epochs must be at least 1");
    }
    if (adam.m.size() != net.parameter_count()) {
        adam = AdamState::fresh(net.parameter_count(), adam.lr);
    }
    TrainingHistory history;
    const auto start = std::chrono::steady_clock::now();
    Eigen::VectorXd params = net.parameters();
    for (long epoch = 1; epoch <= epochs; ++epoch) {
        const auto report = loss(net);
        if (!std::isfinite(report.total)) {
            throw NonFiniteError(fmt::format("non-finite loss at epoch {}", epoch), epoch);
        }
        adam_step(adam, params, report.gradient);
        if (!params.allFinite()) {
            throw NonFiniteError(fmt::format("non-finite parameter at epoch {}", epoch), epoch);
        }
        net.set_parameters(params);
        if (epoch == 1 || epoch == epochs || (log_every > 0 && epoch % log_every == 0)) {
            const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
            history.records.push_back({epoch, report.total, report.components, dt.count()});
        }
    }
    return {std::move(net), std::move(history)};
}

} // namespace advdiff
