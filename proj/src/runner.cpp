#include "advdiff/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "advdiff/bspline.hpp"
#include "advdiff/errors.hpp"
#include "advdiff/fem2d.hpp"
#include "advdiff/pinn.hpp"
#include "advdiff/problem.hpp"
#include "advdiff/vpinn.hpp"

namespace advdiff {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSamples1D = 1000;
constexpr int kGrid2D = 101;

const std::vector<std::pair<Method, std::string>> kMethodNames = {
    {Method::galerkin, "galerkin"},         {Method::resmin, "resmin"},
    {Method::supg, "supg"},                 {Method::pinn, "pinn"},
    {Method::vpinn_strong, "vpinn_strong"}, {Method::vpinn_weak, "vpinn_weak"},
    {Method::vpinn_both, "vpinn_both"},
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

Mesh1D make_mesh_1d(const ExperimentConfig& c) {
    return c.mesh_kind == MeshKind::adaptive ? adaptive_mesh(c.n_points, c.eps)
                                             : uniform_mesh(c.n_points);
}

TensorMesh2D make_mesh_2d(const ExperimentConfig& c) {
    return c.mesh_kind == MeshKind::adaptive ? adaptive_tensor_mesh(c.n_points, c.eps)
                                             : uniform_tensor_mesh(c.n_points);
}

// Multiplicity used for a 1D basis of the given degree.
int multiplicity_for(const ExperimentConfig& c, int degree) {
    return c.multiplicity > 0 ? c.multiplicity : degree;
}

// Value-only evaluation of a network at single points with reused buffers.
class PointEvaluator {
public:
    explicit PointEvaluator(const MlpNetwork& net) : net_(net) {}

    double operator()(double x, double y = 0.0) {
        in_.resize(net_.input_dim());
        in_[0] = x;
        if (net_.input_dim() == 2) {
            in_[1] = y;
        }
        for (int k = 0; k < net_.layers(); ++k) {
            out_.noalias() = net_.weight(k) * in_;
            out_ += net_.bias(k);
            if (k + 1 < net_.layers()) {
                out_ = activation(out_.array()).matrix();
            }
            in_.swap(out_);
        }
        return in_[0];
    }

private:
    const MlpNetwork& net_;
    Eigen::VectorXd in_;
    Eigen::VectorXd out_;
};

double max_outside_layer(const std::function<double(double)>& u, const Problem1D& problem) {
    double m = 0.0;
    const double limit = 1.0 - 2.0 * problem.eps;
    for (double x : sample_grid_1d(kSamples1D)) {
        if (x <= limit) {
            m = std::max(m, std::abs(u(x) - exact_solution_1d(problem, x)));
        }
    }
    return m;
}

void write_solution_1d(const std::filesystem::path& path, const std::function<double(double)>& u,
                       const Problem1D& problem) {
    std::ofstream out(path);
    out << "x,u_exact,u_numeric\n";
    for (double x : sample_grid_1d(kSamples1D)) {
        out << num(x) << ',' << num(exact_solution_1d(problem, x)) << ',' << num(u(x)) << '\n';
    }
}

void write_solution_2d(const std::filesystem::path& path,
                       const std::function<double(double, double)>& u, const ProblemEJ& problem) {
    std::ofstream out(path);
    out << "x,y,u_exact,u_numeric\n";
    for (const auto& [x, y] : sample_grid_2d(kGrid2D)) {
        out << num(x) << ',' << num(y) << ',' << num(problem.exact(x, y)) << ',' << num(u(x, y))
            << '\n';
    }
}

void write_history(const std::filesystem::path& path, const TrainingHistory& history) {
    std::ofstream out(path);
    out << "epoch,loss_total";
    if (!history.records.empty()) {
        for (const auto& c : history.records.front().components) {
            out << ",loss_" << c.name;
        }
    }
    out << ",seconds\n";
    for (const auto& r : history.records) {
        out << r.epoch << ',' << num(r.total);
        for (const auto& c : r.components) {
            out << ',' << num(c.value);
        }
        out << ',' << num(r.seconds) << '\n';
    }
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void run_fem_1d(const ExperimentConfig& c, SolveReport& report) {
    const Problem1D problem{c.eps};
    const Mesh1D mesh = make_mesh_1d(c);
    const auto trial = build_basis(c.trial_degree, mesh.breakpoints,
                                   multiplicity_for(c, c.trial_degree));

    Stopwatch clock;
    FemSolution1D sol = [&] {
        if (c.method == Method::galerkin) {
            return solve_galerkin(problem, trial, c.quad_order);
        }
        const auto test =
            build_basis(c.test_degree, mesh.breakpoints, multiplicity_for(c, c.test_degree));
        return solve_resmin_1d(problem, trial, test, c.quad_order);
    }();
    report.wall_seconds = clock.seconds();

    const auto u = [&](double x) { return sol(x); };
    report.errors = error_norms(sol, problem, kSamples1D);
    report.max_error_outside_layer = max_outside_layer(u, problem);

    FemDiagnostics fem;
    fem.min_value = min_value(sol);
    fem.max_value = max_value(sol);
    fem.oscillation = *fem.min_value < -kOscillationTolerance ||
                      *fem.max_value > 1.0 + kOscillationTolerance;
    fem.max_norm = std::max(std::abs(*fem.min_value), std::abs(*fem.max_value));
    if (sol.residual) {
        fem.residual_norm = sol.residual->h1_norm;
    }
    report.fem = fem;

    write_solution_1d(report.directory / "solution.csv", u, problem);
    report.files.push_back("solution.csv");
}

void run_fem_2d(const ExperimentConfig& c, SolveReport& report) {
    const ProblemEJ problem(c.eps);
    const TensorMesh2D mesh = make_mesh_2d(c);
    Fem2DOptions opts;
    opts.penalty_scale = c.penalty_scale;

    Stopwatch clock;
    FemSolution2D sol = [&] {
        switch (c.method) {
        case Method::galerkin:
            return solve_nitsche_galerkin(problem, mesh, c.trial_degree, c.quad_order, opts);
        case Method::supg:
            return solve_supg(problem, mesh, c.trial_degree, c.quad_order, opts);
        default:
            return solve_resmin_2d(problem, mesh, c.trial_degree, c.test_degree, c.quad_order,
                                   opts);
        }
    }();
    report.wall_seconds = clock.seconds();

    report.errors = error_norms(sol, problem, kGrid2D);
    FemDiagnostics fem;
    fem.max_norm = max_norm(sol);
    if (sol.residual) {
        fem.residual_norm = sol.residual->h1_norm;
    }
    report.fem = fem;

    write_solution_2d(report.directory / "solution.csv",
                      [&](double x, double y) { return sol(x, y); }, problem);
    report.files.push_back("solution.csv");
}

void run_training(const ExperimentConfig& c, SolveReport& report) {
    const VpinnMode mode = c.method == Method::vpinn_strong ? VpinnMode::strong
                           : c.method == Method::vpinn_weak ? VpinnMode::weak
                                                            : VpinnMode::both;
    std::unique_ptr<LossFunctional> loss;
    std::vector<double> breaks_x;
    std::vector<double> breaks_y;
    if (c.dimension == 1) {
        const Mesh1D mesh = make_mesh_1d(c);
        breaks_x = mesh.breakpoints;
        PinnProblem p = make_pinn_problem_1d(c.eps, mesh);
        p.bc_weight = c.bc_weight;
        if (c.method == Method::pinn) {
            loss = std::make_unique<PinnLoss>(std::move(p));
        } else {
            auto space = TestSpace::make_1d(mesh, c.test_degree, c.quad_order);
            loss = std::make_unique<VpinnLoss>(std::move(p), std::move(space), mode,
                                               c.gamma);
        }
    } else {
        const TensorMesh2D mesh = make_mesh_2d(c);
        breaks_x = mesh.mesh_x.breakpoints;
        breaks_y = mesh.mesh_y.breakpoints;
        PinnProblem p = make_pinn_problem_2d(c.eps, mesh);
        p.bc_weight = c.bc_weight;
        if (c.method == Method::pinn) {
            loss = std::make_unique<PinnLoss>(std::move(p));
        } else {
            auto space = TestSpace::make_2d(mesh, c.test_degree, c.quad_order);
            loss = std::make_unique<VpinnLoss>(std::move(p), std::move(space), mode,
                                               c.gamma);
        }
    }

    MlpNetwork net = init_network(c.widths, c.seed);
    const auto n_params = net.parameter_count();
    const LossEvaluator evaluator = [&](const MlpNetwork& n) { return loss_gradient(n, *loss); };

    Stopwatch clock;
    TrainResult result =
        train(std::move(net), evaluator, c.epochs, AdamState::fresh(n_params, c.lr), c.log_every);
    report.wall_seconds = clock.seconds();

    const LossReport final_loss = loss_gradient(result.net, *loss);
    TrainingSummary summary;
    summary.epochs = c.epochs;
    summary.final_loss = final_loss.total;
    summary.final_components = final_loss.components;
    summary.parameter_count = n_params;
    report.training = summary;

    write_history(report.directory / "loss_history.csv", result.history);
    {
        std::ofstream out(report.directory / "network.txt");
        save_checkpoint(result.net, out);
    }

    PointEvaluator eval(result.net);
    if (c.dimension == 1) {
        const Problem1D problem{c.eps};
        const auto u = [&](double x) { return eval(x); };
        report.errors = error_norms(u, problem, breaks_x, 10, kSamples1D);
        report.max_error_outside_layer = max_outside_layer(u, problem);
        write_solution_1d(report.directory / "solution.csv", u, problem);
    } else {
        const ProblemEJ problem(c.eps);
        const auto u = [&](double x, double y) { return eval(x, y); };
        report.errors = error_norms_2d(u, problem, breaks_x, breaks_y, kGrid2D);
        write_solution_2d(report.directory / "solution.csv", u, problem);
    }
    report.files = {"solution.csv", "loss_history.csv", "network.txt"};
}

ordered_json config_json(const ExperimentConfig& c) {
    ordered_json j;
    j["name"] = c.name;
    j["method"] = to_string(c.method);
    j["dimension"] = c.dimension;
    j["eps"] = c.eps;
    j["mesh"] = {{"kind", to_string(c.mesh_kind)}, {"n_points", c.n_points}};
    j["widths"] = c.widths;
    j["lr"] = c.lr;
    j["epochs"] = c.epochs;
    j["seed"] = c.seed;
    j["log_every"] = c.log_every;
    j["quad_order"] = c.quad_order;
    j["gamma"] = c.gamma;
    j["bc_weight"] = c.bc_weight;
    j["trial_degree"] = c.trial_degree;
    j["test_degree"] = c.test_degree;
    j["multiplicity"] = c.multiplicity;
    j["penalty_scale"] = c.penalty_scale;
    j["output_dir"] = c.output_dir;
    return j;
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key, const T& fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(fmt::format("config field '{}' has the wrong type", key));
    }
}

ExperimentConfig parse_object(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("experiment config must be a JSON object");
    }
    static const std::set<std::string> known = {
        "name",   "method",   "dimension",    "eps",         "mesh",         "widths",
        "lr",     "epochs",   "seed",         "log_every",   "quad_order",   "gamma",
        "bc_weight", "trial_degree", "test_degree", "multiplicity", "penalty_scale",
        "output_dir"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError(fmt::format("unknown config field '{}'", key));
        }
    }
    if (!j.contains("method")) {
        throw ConfigError("config field 'method' is required");
    }

    ExperimentConfig c;
    c.name = get_field<std::string>(j, "name", "");
    c.method = parse_method(get_field<std::string>(j, "method", ""));
    c.dimension = get_field<int>(j, "dimension", c.dimension);
    c.eps = get_field<double>(j, "eps", c.eps);
    if (j.contains("mesh")) {
        const auto& m = j.at("mesh");
        if (!m.is_object()) {
            throw ConfigError("config field 'mesh' must be an object");
        }
        for (const auto& [key, value] : m.items()) {
            if (key != "kind" && key != "n_points") {
                throw ConfigError(fmt::format("unknown mesh field '{}'", key));
            }
        }
        const auto kind = get_field<std::string>(m, "kind", to_string(c.mesh_kind));
        if (kind == "uniform") {
            c.mesh_kind = MeshKind::uniform;
        } else if (kind == "adaptive") {
            c.mesh_kind = MeshKind::adaptive;
        } else {
            throw ConfigError(fmt::format("unknown mesh kind '{}'", kind));
        }
        c.n_points = get_field<int>(m, "n_points", c.n_points);
    }
    c.widths = get_field<std::vector<int>>(j, "widths", {});
    c.lr = get_field<double>(j, "lr", c.lr);
    c.epochs = get_field<long>(j, "epochs", c.epochs);
    if (j.contains("seed") && !j.at("seed").is_number_unsigned()) {
        throw ConfigError("config field 'seed' must be a nonnegative integer");
    }
    c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
    c.log_every = get_field<long>(j, "log_every", c.log_every);
    c.quad_order = get_field<int>(j, "quad_order", c.quad_order);
    c.gamma = get_field<double>(j, "gamma", c.gamma);
    c.bc_weight = get_field<double>(j, "bc_weight", c.bc_weight);
    c.trial_degree = get_field<int>(j, "trial_degree", c.trial_degree);
    c.test_degree = get_field<int>(j, "test_degree", c.test_degree);
    c.multiplicity = get_field<int>(j, "multiplicity", c.multiplicity);
    c.penalty_scale = get_field<double>(j, "penalty_scale", c.penalty_scale);
    c.output_dir = get_field<std::string>(j, "output_dir", "");
    return c;
}

nlohmann::json parse_text(std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(fmt::format("malformed JSON: {}", e.what()));
    }
}

std::string directory_name(std::size_t index, const std::string& name) {
    std::string safe;
    for (char ch : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ||
                        ch == '.';
        safe += ok ? ch : '_';
    }
    return fmt::format("{:03d}_{}", index, safe);
}

} // namespace

std::string to_string(Method method) {
    for (const auto& [m, name] : kMethodNames) {
        if (m == method) {
            return name;
        }
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (const auto& [m, n] : kMethodNames) {
        if (n == name) {
            return m;
        }
    }
    throw ConfigError(fmt::format("unknown method '{}'", name));
}

bool is_trained(Method method) {
    return method == Method::pinn || method == Method::vpinn_strong ||
           method == Method::vpinn_weak || method == Method::vpinn_both;
}

ExperimentConfig ExperimentConfig::normalized() const {
    ExperimentConfig c = *this;
    if (is_trained(c.method)) {
        if (c.widths.empty()) {
            c.widths = {c.dimension, 20, 20, 20, 20, 1};
        }
        if (c.test_degree == 0) {
            c.test_degree = kTestDegree;
        }
    } else {
        if (c.trial_degree == 0) {
            c.trial_degree = (c.method == Method::resmin && c.dimension == 1) ? 1 : 2;
        }
        if (c.test_degree == 0 && c.method == Method::resmin) {
            c.test_degree = c.trial_degree + 1;
        }
    }
    if (c.name.empty()) {
        c.name = fmt::format("{}_{}d_{}_n{}_eps{}", to_string(c.method), c.dimension,
                             to_string(c.mesh_kind), c.n_points, c.eps);
        if (is_trained(c.method)) {
            c.name += fmt::format("_seed{}", c.seed);
        }
    }
    return c;
}

void validate(const ExperimentConfig& c) {
    if (c.dimension != 1 && c.dimension != 2) {
        throw ConfigError(fmt::format("dimension must be 1 or 2, got {}", c.dimension));
    }
    if (c.method == Method::supg && c.dimension != 2) {
        throw ConfigError("supg is only available in 2D");
    }
    if (!(c.eps > 0.0) || !std::isfinite(c.eps)) {
        throw ConfigError("eps must be a positive finite number");
    }
    if (c.n_points < 2) {
        throw ConfigError("mesh.n_points must be at least 2");
    }
    try {
        if (c.mesh_kind == MeshKind::adaptive) {
            (void)adaptive_mesh(c.n_points, c.eps);
        }
    } catch (const Error& e) {
        throw ConfigError(fmt::format("invalid adaptive mesh: {}", e.what()));
    }

    if (is_trained(c.method)) {
        const auto& w = c.widths;
        if (w.size() < 2 || w.front() != c.dimension || w.back() != 1 ||
            std::any_of(w.begin(), w.end(), [](int v) { return v < 1; })) {
            throw ConfigError(
                "widths must start with the dimension, end with 1 and contain only positive sizes");
        }
        if (!(c.lr > 0.0)) {
            throw ConfigError("lr must be positive");
        }
        if (c.epochs < 1 || c.log_every < 1) {
            throw ConfigError("epochs and log_every must be at least 1");
        }
        if (c.quad_order < 0 || c.test_degree < 1) {
            throw ConfigError("quad_order must be >= 0 and test_degree >= 1");
        }
        if (!(c.bc_weight > 0.0) || !std::isfinite(c.gamma)) {
            throw ConfigError("bc_weight must be positive and gamma finite");
        }
        return;
    }

    if (c.trial_degree < 1) {
        throw ConfigError("trial_degree must be at least 1");
    }
    if (c.method == Method::supg && c.trial_degree < 2) {
        throw ConfigError("supg needs trial_degree >= 2");
    }
    if (c.quad_order < 0) {
        throw ConfigError("quad_order must be >= 0");
    }
    if (!(c.penalty_scale > 0.0)) {
        throw ConfigError("penalty_scale must be positive");
    }
    if (c.method == Method::resmin && c.test_degree < c.trial_degree) {
        throw ConfigError("resmin needs test_degree >= trial_degree");
    }
    if (c.dimension == 1) {
        const int degrees[2] = {c.trial_degree, c.method == Method::resmin ? c.test_degree : 0};
        for (int p : degrees) {
            if (p > 0 && c.multiplicity > p) {
                throw ConfigError(
                    fmt::format("multiplicity {} exceeds degree {}", c.multiplicity, p));
            }
        }
        if (c.multiplicity < 0) {
            throw ConfigError("multiplicity must be >= 0");
        }
        if (c.method == Method::resmin) {
            const Mesh1D mesh = make_mesh_1d(c);
            const auto trial = build_basis(c.trial_degree, mesh.breakpoints,
                                           multiplicity_for(c, c.trial_degree));
            const auto test = build_basis(c.test_degree, mesh.breakpoints,
                                          multiplicity_for(c, c.test_degree));
            if (test.dimension() < trial.dimension()) {
                throw ConfigError("resmin test space is smaller than the trial space");
            }
        }
    }
}

ExperimentConfig config_from_json(std::string_view text) {
    return parse_object(parse_text(text));
}

std::vector<ExperimentConfig> configs_from_json(std::string_view text) {
    const auto j = parse_text(text);
    if (!j.is_array()) {
        throw ConfigError("suite file must be a JSON array of experiment configs");
    }
    std::vector<ExperimentConfig> out;
    for (const auto& item : j) {
        out.push_back(parse_object(item));
    }
    return out;
}

std::string config_to_json(const ExperimentConfig& config) {
    return config_json(config).dump(2);
}

namespace {

ordered_json payload(const SolveReport& r) {
    const auto& c = r.config;
    ordered_json j;
    j["status"] = r.ok ? "ok" : "failed";
    j["exit_code"] = r.exit_code;
    j["config"] = config_json(c);

    ordered_json mesh;
    mesh["kind"] = to_string(c.mesh_kind);
    mesh["n_points"] = c.n_points;
    mesh["points_interpretation"] =
        c.dimension == 1 ? "total number of points on [0, 1]"
                         : "points per direction (n_points x n_points tensor grid)";
    if (c.mesh_kind == MeshKind::adaptive) {
        const Mesh1D m = make_mesh_1d(c);
        mesh["recurrence"] = kAdaptiveRecurrence;
        mesh["geometric_prefix"] = m.geometric_prefix;
        mesh["adapted_direction"] = c.dimension == 1 ? "x" : "x (y uniform)";
    } else {
        mesh["recurrence"] = nullptr;
        mesh["geometric_prefix"] = nullptr;
        mesh["adapted_direction"] = nullptr;
    }
    j["mesh"] = mesh;

    if (r.ok) {
        ordered_json e;
        e["mse"] = r.errors.mse;
        e["l2"] = r.errors.l2;
        e["max"] = r.errors.max;
        if (r.max_error_outside_layer) {
            e["max_outside_layer"] = *r.max_error_outside_layer;
        } else {
            e["max_outside_layer"] = nullptr;
        }
        e["samples"] = r.errors.samples;
        e["sample_grid"] = c.dimension == 1 ? "1000 uniform points on [0, 1] including both ends"
                                            : "101 x 101 uniform grid on [0, 1]^2";
        j["errors"] = e;
    } else {
        j["errors"] = nullptr;
    }

    if (r.fem) {
        ordered_json f;
        if (r.fem->min_value) {
            f["min_value"] = *r.fem->min_value;
            f["max_value"] = *r.fem->max_value;
            f["undershoot"] = std::max(0.0, -*r.fem->min_value);
            f["overshoot"] = std::max(0.0, *r.fem->max_value - 1.0);
            f["oscillation"] = *r.fem->oscillation;
            f["oscillation_tolerance"] = kOscillationTolerance;
        }
        f["max_norm"] = r.fem->max_norm;
        if (r.fem->residual_norm) {
            f["residual_h1_norm"] = *r.fem->residual_norm;
        } else {
            f["residual_h1_norm"] = nullptr;
        }
        j["fem"] = f;
    } else {
        j["fem"] = nullptr;
    }

    if (r.training) {
        ordered_json t;
        t["epochs"] = r.training->epochs;
        t["parameter_count"] = r.training->parameter_count;
        t["final_loss"] = r.training->final_loss;
        ordered_json comps = ordered_json::object();
        for (const auto& comp : r.training->final_components) {
            comps[comp.name] = comp.value;
        }
        t["final_components"] = comps;
        j["training"] = t;
    } else {
        j["training"] = nullptr;
    }

    j["files"] = r.files;

    if (r.ok) {
        j["failure"] = nullptr;
    } else {
        ordered_json f;
        f["type"] = r.error_type;
        f["message"] = r.error_message;
        if (r.rcond) {
            f["rcond"] = *r.rcond;
        }
        if (r.failed_epoch) {
            f["epoch"] = *r.failed_epoch;
        }
        j["failure"] = f;
    }
    return j;
}

} // namespace

std::string SolveReport::payload_json() const { return payload(*this).dump(2); }

std::string SolveReport::to_json() const {
    ordered_json j = payload(*this);
    j["timing"] = {{"wall_seconds", wall_seconds}};
    return j.dump(2);
}

SolveReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    SolveReport report;
    report.config = config.normalized();
    validate(report.config);
    report.directory = out_dir;
    std::filesystem::create_directories(out_dir);

    try {
        if (is_trained(report.config.method)) {
            run_training(report.config, report);
        } else if (report.config.dimension == 1) {
            run_fem_1d(report.config, report);
        } else {
            run_fem_2d(report.config, report);
        }
        report.ok = true;
        report.exit_code = 0;
    } catch (const SolverFailureError& e) {
        report.error_type = "solver_failure";
        report.error_message = e.what();
        report.rcond = e.rcond();
    } catch (const NonFiniteError& e) {
        report.error_type = "non_finite";
        report.error_message = e.what();
        report.failed_epoch = e.epoch();
    } catch (const Error& e) {
        report.error_type = "solver_error";
        report.error_message = e.what();
    }
    if (!report.ok) {
        report.exit_code = 3;
        report.files.clear();
    }

    report.files.push_back("report.json");
    std::ofstream out(out_dir / "report.json");
    out << report.to_json() << '\n';
    return report;
}

std::vector<SuiteRow> run_suite(const std::vector<ExperimentConfig>& configs,
                                const std::filesystem::path& out_dir, int threads) {
    std::vector<ExperimentConfig> normalized;
    for (const auto& c : configs) {
        normalized.push_back(c.normalized());
        validate(normalized.back());
    }
    std::filesystem::create_directories(out_dir);

    std::vector<SuiteRow> rows(normalized.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < normalized.size(); i = next++) {
            const auto dir = out_dir / directory_name(i, normalized[i].name);
            SuiteRow row;
            row.config = normalized[i];
            try {
                const SolveReport r = run_experiment(normalized[i], dir);
                row.status = r.ok ? "ok" : r.error_type;
                row.errors = r.errors;
            } catch (const std::exception&) {
                row.status = "error";
            }
            rows[i] = std::move(row);
        }
    };
    threads = std::max(1, std::min<int>(threads, static_cast<int>(normalized.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    std::ofstream out(out_dir / "summary.csv");
    out << "name,method,dimension,eps,mesh,n_points,seed,mse,l2,max,status\n";
    for (const auto& row : rows) {
        const auto& c = row.config;
        out << c.name << ',' << to_string(c.method) << ',' << c.dimension << ',' << num(c.eps)
            << ',' << to_string(c.mesh_kind) << ',' << c.n_points << ',' << c.seed << ',';
        if (row.status == "ok") {
            out << num(row.errors.mse) << ',' << num(row.errors.l2) << ',' << num(row.errors.max);
        } else {
            out << ",,";
        }
        out << ',' << row.status << '\n';
    }
    return rows;
}

int thread_count_from_env(int fallback) {
    const char* value = std::getenv(kThreadsEnv);
    if (value == nullptr) {
        return fallback;
    }
    char* end = nullptr;
    const long n = std::strtol(value, &end, 10);
    if (end == value || *end != '\0' || n < 1) {
        return fallback;
    }
    return static_cast<int>(std::min(n, 256L));
}

} // namespace advdiff
