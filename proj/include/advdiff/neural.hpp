#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace advdiff {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// tanh through the vectorized exponential, 1 - 2 / (exp(2z) + 1). Exact at 0,
/// saturates to +-1, absolute error at the level of double rounding.
template <typename Derived>
Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic> activation(const Eigen::ArrayBase<Derived>& z) {
    return 1.0 - 2.0 / ((2.0 * z).exp() + 1.0);
}

/// Dense tanh network with a linear output layer.
///
/// Parameters are stored flat. For each layer k the weight matrix
/// (out x in, row-major) comes first, followed by its bias vector.
class MlpNetwork {
public:
    MlpNetwork(std::vector<int> widths, Eigen::VectorXd parameters);

    const std::vector<int>& widths() const noexcept { return widths_; }
    int input_dim() const noexcept { return widths_.front(); }
    int layers() const noexcept { return static_cast<int>(widths_.size()) - 1; }
    Eigen::Index parameter_count() const noexcept { return params_.size(); }

    const Eigen::VectorXd& parameters() const noexcept { return params_; }
    void set_parameters(const Eigen::VectorXd& p);

    Eigen::Map<const RowMatrix> weight(int layer) const;
    Eigen::Map<const Eigen::VectorXd> bias(int layer) const;

    /// Offsets of the weight block and bias block of `layer` in the flat vector.
    std::pair<Eigen::Index, Eigen::Index> offsets(int layer) const;

    static Eigen::Index count_parameters(const std::vector<int>& widths);

private:
    std::vector<int> widths_;
    std::vector<Eigen::Index> offsets_;
    Eigen::VectorXd params_;
};

/// Glorot-uniform weights, zero biases. Deterministic for a seed.
MlpNetwork init_network(const std::vector<int>& widths, std::uint64_t seed);

/// Output value and input derivatives at a single point. No mixed derivative.
struct JetValue {
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dxx = 0.0;
    double dyy = 0.0;
};

/// Network outputs (or adjoints of a loss with respect to them) at a batch of points.
/// `d1[i]` and `d2[i]` hold first and second derivatives along input i.
struct JetBatch {
    int dim = 1;
    Eigen::RowVectorXd value;
    std::array<Eigen::RowVectorXd, 2> d1;
    std::array<Eigen::RowVectorXd, 2> d2;

    static JetBatch zeros(int dim, Eigen::Index n);
    Eigen::Index size() const { return value.size(); }
    JetValue at(Eigen::Index k) const;
};

/// Intermediate values of a forward pass, kept for the reverse sweep.
///
/// Every per-layer matrix stores its channels side by side: columns
/// [c*n, (c+1)*n) hold channel c, where channel 0 is the value, 1..d the
/// first input derivatives and d+1..2d the second input derivatives.
struct ForwardTape {
    struct Layer {
        Eigen::MatrixXd input;      // all channels of the layer input (empty for layer 0)
        Eigen::MatrixXd z;          // all channels of the pre-activation
        Eigen::MatrixXd t, s1, s2;  // tanh, tanh', tanh'' at the pre-activation value
    };
    int dim = 1;
    Eigen::MatrixXd points;
    std::vector<Layer> layers;
    Eigen::MatrixXd last_input;     // input of the linear output layer
    JetBatch output;
};

/// Forward pass carrying value, first and second input derivatives.
/// `points` is input_dim x N.
ForwardTape forward(const MlpNetwork& net, const Eigen::MatrixXd& points);

/// Gradient of a scalar loss with respect to every parameter, given the
/// loss's partial derivatives with respect to each output jet entry.
Eigen::VectorXd backward(const MlpNetwork& net, const ForwardTape& tape, const JetBatch& adjoint);

JetValue eval_with_input_derivs(const MlpNetwork& net, std::span<const double> point);
JetValue eval_with_input_derivs(const MlpNetwork& net, double x);
JetValue eval_with_input_derivs(const MlpNetwork& net, double x, double y);

/// Plain value evaluation at many points (input_dim x N).
Eigen::RowVectorXd evaluate(const MlpNetwork& net, const Eigen::MatrixXd& points);

struct LossComponent {
    std::string name;
    double value;
};

/// Scalar loss split into named parts, plus its parameter gradient.
struct LossReport {
    double total = 0.0;
    std::vector<LossComponent> components;
    Eigen::VectorXd gradient;

    double component(const std::string& name) const;
};

/// A scalar loss of the network outputs at a fixed set of points. `evaluate`
/// returns the components and, when `adjoint` is non-null, fills it with the
/// partial derivatives of the summed loss with respect to the output jets.
class LossFunctional {
public:
    virtual ~LossFunctional() = default;
    virtual int dimension() const = 0;
    virtual const Eigen::MatrixXd& points() const = 0;
    virtual std::vector<LossComponent> evaluate(const JetBatch& outputs, JetBatch* adjoint) const = 0;
};

LossReport loss_gradient(const MlpNetwork& net, const LossFunctional& loss);

/// Loss value for jets supplied directly (e.g. an analytic solution).
LossReport loss_value(const LossFunctional& loss, const JetBatch& outputs);

/// Checkpoint: "widths" line, "parameters <n>" line, then one value per line.
void save_checkpoint(const MlpNetwork& net, std::ostream& out);
MlpNetwork load_checkpoint(std::istream& in);

} // namespace advdiff
