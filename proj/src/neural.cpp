#include "advdiff/neural.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "advdiff/errors.hpp"

namespace advdiff {

namespace {

void check_widths(const std::vector<int>& widths) {
    if (widths.size() < 2) {
        throw InvalidArgumentError("network needs at least an input and an output layer");
    }
    if (widths.front() != 1 && widths.front() != 2) {
        throw InvalidArgumentError("network input width must be 1 or 2");
    }
    if (widths.back() != 1) {
        throw InvalidArgumentError("network output width must be 1");
    }
    for (int w : widths) {
        if (w < 1) {
            throw InvalidArgumentError("layer widths must be positive");
        }
    }
}

} // namespace

Eigen::Index MlpNetwork::count_parameters(const std::vector<int>& widths) {
    Eigen::Index n = 0;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        n += static_cast<Eigen::Index>(widths[k + 1]) * widths[k] + widths[k + 1];
    }
    return n;
}

MlpNetwork::MlpNetwork(std::vector<int> widths, Eigen::VectorXd parameters)
    : widths_(std::move(widths)), params_(std::move(parameters)) {
    check_widths(widths_);
    if (params_.size() != count_parameters(widths_)) {
        throw InvalidArgumentError(fmt::format("expected {} parameters, got {}",
                                               count_parameters(widths_), params_.size()));
    }
    Eigen::Index off = 0;
    for (std::size_t k = 0; k + 1 < widths_.size(); ++k) {
        offsets_.push_back(off);
        off += static_cast<Eigen::Index>(widths_[k + 1]) * widths_[k] + widths_[k + 1];
    }
}

void MlpNetwork::set_parameters(const Eigen::VectorXd& p) {
    if (p.size() != params_.size()) {
        throw InvalidArgumentError("parameter vector length mismatch");
    }
    params_ = p;
}

std::pair<Eigen::Index, Eigen::Index> MlpNetwork::offsets(int layer) const {
    const Eigen::Index w = offsets_[layer];
    return {w, w + static_cast<Eigen::Index>(widths_[layer + 1]) * widths_[layer]};
}

Eigen::Map<const RowMatrix> MlpNetwork::weight(int layer) const {
    return {params_.data() + offsets(layer).first, widths_[layer + 1], widths_[layer]};
}

Eigen::Map<const Eigen::VectorXd> MlpNetwork::bias(int layer) const {
    return {params_.data() + offsets(layer).second, widths_[layer + 1]};
}

MlpNetwork init_network(const std::vector<int>& widths, std::uint64_t seed) {
    check_widths(widths);
    std::mt19937_64 rng(seed);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(MlpNetwork::count_parameters(widths));
    Eigen::Index off = 0;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        const int fan_in = widths[k];
        const int fan_out = widths[k + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(fan_in) * fan_out; ++i) {
            p[off++] = dist(rng);
        }
        off += fan_out;
    }
    return MlpNetwork(widths, std::move(p));
}

JetBatch JetBatch::zeros(int dim, Eigen::Index n) {
    JetBatch b;
    b.dim = dim;
    b.value = Eigen::RowVectorXd::Zero(n);
    for (int i = 0; i < 2; ++i) {
        b.d1[i] = Eigen::RowVectorXd::Zero(i < dim ? n : 0);
        b.d2[i] = Eigen::RowVectorXd::Zero(i < dim ? n : 0);
    }
    return b;
}

JetValue JetBatch::at(Eigen::Index k) const {
    JetValue v;
    v.value = value[k];
    v.dx = d1[0][k];
    v.dxx = d2[0][k];
    if (dim > 1) {
        v.dy = d1[1][k];
        v.dyy = d2[1][k];
    }
    return v;
}

ForwardTape forward(const MlpNetwork& net, const Eigen::MatrixXd& points) {
    const int d = net.input_dim();
    if (points.rows() != d) {
        throw InvalidArgumentError(
            fmt::format("points have dimension {}, network expects {}", points.rows(), d));
    }
    const Eigen::Index n = points.cols();
    const int channels = 2 * d + 1;
    const int layers = net.layers();

    ForwardTape tape;
    tape.dim = d;
    tape.points = points;
    tape.layers.resize(layers - 1);

    Eigen::MatrixXd x;
    for (int k = 0; k + 1 < layers; ++k) {
        const auto w = net.weight(k);
        const auto b = net.bias(k);
        auto& layer = tape.layers[k];

        Eigen::MatrixXd& z = layer.z;
        if (k == 0) {
            z.resize(w.rows(), channels * n);
            z.leftCols(n).noalias() = w * points;
            for (int i = 0; i < d; ++i) {
                z.middleCols((1 + i) * n, n) = w.col(i).replicate(1, n);
                z.middleCols((1 + d + i) * n, n).setZero();
            }
        } else {
            layer.input = std::move(x);
            z.noalias() = w * layer.input;
        }
        z.leftCols(n).colwise() += b;

        layer.t = activation(z.leftCols(n).array()).matrix();
        layer.s1 = (1.0 - layer.t.array().square()).matrix();
        layer.s2 = (-2.0 * layer.t.array() * layer.s1.array()).matrix();

        x.resize(w.rows(), channels * n);
        x.leftCols(n) = layer.t;
        for (int i = 0; i < d; ++i) {
            const auto zi = z.middleCols((1 + i) * n, n).array();
            const auto zii = z.middleCols((1 + d + i) * n, n).array();
            x.middleCols((1 + i) * n, n) = (layer.s1.array() * zi).matrix();
            x.middleCols((1 + d + i) * n, n) =
                (layer.s2.array() * zi.square() + layer.s1.array() * zii).matrix();
        }
    }

    // Linear output layer.
    const auto w = net.weight(layers - 1);
    const double b = net.bias(layers - 1)[0];
    tape.output = JetBatch::zeros(d, n);
    if (layers == 1) {
        tape.output.value = (w * points).array() + b;
        for (int i = 0; i < d; ++i) {
            tape.output.d1[i].setConstant(w(0, i));
        }
        return tape;
    }
    const Eigen::RowVectorXd u = w * x;
    tape.output.value = u.head(n).array() + b;
    for (int i = 0; i < d; ++i) {
        tape.output.d1[i] = u.segment((1 + i) * n, n);
        tape.output.d2[i] = u.segment((1 + d + i) * n, n);
    }
    tape.last_input = std::move(x);
    return tape;
}

Eigen::VectorXd backward(const MlpNetwork& net, const ForwardTape& tape, const JetBatch& adjoint) {
    const int d = tape.dim;
    const int layers = net.layers();
    const Eigen::Index n = tape.points.cols();
    const int channels = 2 * d + 1;
    if (adjoint.size() != n) {
        throw InvalidArgumentError("adjoint batch size does not match the forward pass");
    }
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.parameter_count());

    // Output layer.
    const auto w_out = net.weight(layers - 1);
    const auto [wo_off, bo_off] = net.offsets(layers - 1);
    Eigen::Map<RowMatrix> gw_out(grad.data() + wo_off, w_out.rows(), w_out.cols());
    grad[bo_off] = adjoint.value.sum();

    if (layers == 1) {
        gw_out += adjoint.value * tape.points.transpose();
        for (int i = 0; i < d; ++i) {
            gw_out(0, i) += adjoint.d1[i].sum();
        }
        return grad;
    }

    Eigen::RowVectorXd ubar(channels * n);
    ubar.head(n) = adjoint.value;
    for (int i = 0; i < d; ++i) {
        ubar.segment((1 + i) * n, n) = adjoint.d1[i];
        ubar.segment((1 + d + i) * n, n) = adjoint.d2[i];
    }
    gw_out.noalias() += ubar * tape.last_input.transpose();
    Eigen::MatrixXd xbar = w_out.transpose() * ubar;

    Eigen::MatrixXd zbar;
    for (int k = layers - 2; k >= 0; --k) {
        const auto& layer = tape.layers[k];
        const auto s1 = layer.s1.array();
        const auto s2 = layer.s2.array();
        const Eigen::ArrayXXd s3 = -2.0 * s1.square() + 4.0 * layer.t.array().square() * s1;

        zbar.resize(xbar.rows(), channels * n);
        Eigen::ArrayXXd z0 = xbar.leftCols(n).array() * s1;
        for (int i = 0; i < d; ++i) {
            const auto zi = layer.z.middleCols((1 + i) * n, n).array();
            const auto zii = layer.z.middleCols((1 + d + i) * n, n).array();
            const auto a1 = xbar.middleCols((1 + i) * n, n).array();
            const auto a2 = xbar.middleCols((1 + d + i) * n, n).array();
            zbar.middleCols((1 + d + i) * n, n) = (a2 * s1).matrix();
            zbar.middleCols((1 + i) * n, n) = (a1 * s1 + 2.0 * a2 * s2 * zi).matrix();
            z0 += a1 * s2 * zi + a2 * (s3 * zi.square() + s2 * zii);
        }
        zbar.leftCols(n) = z0.matrix();

        const auto w = net.weight(k);
        const auto [w_off, b_off] = net.offsets(k);
        Eigen::Map<RowMatrix> gw(grad.data() + w_off, w.rows(), w.cols());
        grad.segment(b_off, w.rows()) += zbar.leftCols(n).rowwise().sum();

        if (k == 0) {
            gw.noalias() += zbar.leftCols(n) * tape.points.transpose();
            for (int i = 0; i < d; ++i) {
                gw.col(i) += zbar.middleCols((1 + i) * n, n).rowwise().sum();
            }
        } else {
            gw.noalias() += zbar * layer.input.transpose();
            xbar.noalias() = w.transpose() * zbar;
        }
    }
    return grad;
}

JetValue eval_with_input_derivs(const MlpNetwork& net, std::span<const double> point) {
    if (static_cast<int>(point.size()) != net.input_dim()) {
        throw InvalidArgumentError(fmt::format("point has dimension {}, network expects {}",
                                               point.size(), net.input_dim()));
    }
    Eigen::MatrixXd p(net.input_dim(), 1);
    for (int i = 0; i < net.input_dim(); ++i) {
        p(i, 0) = point[i];
    }
    return forward(net, p).output.at(0);
}

JetValue eval_with_input_derivs(const MlpNetwork& net, double x) {
    const double p[] = {x};
    return eval_with_input_derivs(net, std::span<const double>(p));
}

JetValue eval_with_input_derivs(const MlpNetwork& net, double x, double y) {
    const double p[] = {x, y};
    return eval_with_input_derivs(net, std::span<const double>(p));
}

Eigen::RowVectorXd evaluate(const MlpNetwork& net, const Eigen::MatrixXd& points) {
    if (points.rows() != net.input_dim()) {
        throw InvalidArgumentError("point dimension mismatch");
    }
    Eigen::MatrixXd x = points;
    for (int k = 0; k + 1 < net.layers(); ++k) {
        x = activation(((net.weight(k) * x).colwise() + net.bias(k)).array()).matrix();
    }
    Eigen::RowVectorXd out = net.weight(net.layers() - 1) * x;
    out.array() += net.bias(net.layers() - 1)[0];
    return out;
}

double LossReport::component(const std::string& name) const {
    for (const auto& c : components) {
        if (c.name == name) {
            return c.value;
        }
    }
    throw InvalidArgumentError("no loss component named " + name);
}

namespace {

double sum_components(const std::vector<LossComponent>& cs) {
    double s = 0.0;
    for (const auto& c : cs) {
        s += c.value;
    }
    return s;
}

} // namespace

LossReport loss_gradient(const MlpNetwork& net, const LossFunctional& loss) {
    if (loss.dimension() != net.input_dim()) {
        throw InvalidArgumentError("loss and network dimensions differ");
    }
    // Points are processed in fixed-size blocks so each block's tape stays in
    // cache; the block order is fixed, so the reduction is deterministic.
    constexpr Eigen::Index kBlock = 128;
    const auto& points = loss.points();
    const int d = net.input_dim();
    const Eigen::Index n = points.cols();

    std::vector<ForwardTape> tapes;
    JetBatch outputs = JetBatch::zeros(d, n);
    for (Eigen::Index s = 0; s < n; s += kBlock) {
        const Eigen::Index len = std::min(kBlock, n - s);
        tapes.push_back(forward(net, points.middleCols(s, len)));
        const auto& out = tapes.back().output;
        outputs.value.segment(s, len) = out.value;
        for (int i = 0; i < d; ++i) {
            outputs.d1[i].segment(s, len) = out.d1[i];
            outputs.d2[i].segment(s, len) = out.d2[i];
        }
    }

    JetBatch adjoint = JetBatch::zeros(d, n);
    LossReport report;
    report.components = loss.evaluate(outputs, &adjoint);
    report.total = sum_components(report.components);
    report.gradient = Eigen::VectorXd::Zero(net.parameter_count());
    for (std::size_t b = 0; b < tapes.size(); ++b) {
        const Eigen::Index s = static_cast<Eigen::Index>(b) * kBlock;
        const Eigen::Index len = tapes[b].points.cols();
        JetBatch block = JetBatch::zeros(d, len);
        block.value = adjoint.value.segment(s, len);
        for (int i = 0; i < d; ++i) {
            block.d1[i] = adjoint.d1[i].segment(s, len);
            block.d2[i] = adjoint.d2[i].segment(s, len);
        }
        report.gradient += backward(net, tapes[b], block);
    }
    return report;
}

LossReport loss_value(const LossFunctional& loss, const JetBatch& outputs) {
    LossReport report;
    report.components = loss.evaluate(outputs, nullptr);
    report.total = sum_components(report.components);
    return report;
}

void save_checkpoint(const MlpNetwork& net, std::ostream& out) {
    out << "widths";
    for (int w : net.widths()) {
        out << ' ' << w;
    }
    out << '\n' << "parameters " << net.parameter_count() << '\n';
    for (Eigen::Index i = 0; i < net.parameter_count(); ++i) {
        out << fmt::format("{:.17g}\n", net.parameters()[i]);
    }
}

MlpNetwork load_checkpoint(std::istream& in) {
    std::string line;
    std::string tag;
    if (!std::getline(in, line)) {
        throw InvalidArgumentError("empty checkpoint");
    }
    std::istringstream header(line);
    header >> tag;
    if (tag != "widths") {
        throw InvalidArgumentError("checkpoint must start with a widths line");
    }
    std::vector<int> widths;
    for (int w; header >> w;) {
        widths.push_back(w);
    }
    Eigen::Index count = 0;
    in >> tag >> count;
    if (tag != "parameters") {
        throw InvalidArgumentError("checkpoint is missing the parameters line");
    }
    Eigen::VectorXd p(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        if (!(in >> p[i])) {
            throw InvalidArgumentError("checkpoint truncated");
        }
    }
    return MlpNetwork(std::move(widths), std::move(p));
}

} // namespace advdiff
