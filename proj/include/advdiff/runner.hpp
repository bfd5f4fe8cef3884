#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advdiff/fem1d.hpp"
#include "advdiff/mesh.hpp"
#include "advdiff/neural.hpp"
#include "advdiff/optimizer.hpp"

namespace advdiff {

enum class Method { galerkin, resmin, supg, pinn, vpinn_strong, vpinn_weak, vpinn_both };

std::string to_string(Method method);
Method parse_method(std::string_view name);

bool is_trained(Method method);

/// One experiment. Zero-valued optional integers select the method default.
struct ExperimentConfig {
    std::string name;
    Method method = Method::pinn;
    int dimension = 1;
    double eps = 0.001;
    MeshKind mesh_kind = MeshKind::adaptive;
    /// 1D: number of points. 2D: points per direction (50 means a 50 x 50 grid).
    int n_points = 100;

    // Neural methods.
    std::vector<int> widths;          ///< empty: {dimension, 20, 20, 20, 20, 1}
    double lr = kDefaultLearningRate;
    long epochs = 40000;
    std::uint64_t seed = 1;
    long log_every = 100;
    int quad_order = 0;               ///< 0: method default
    double gamma = 1.0;
    double bc_weight = 1.0;

    // Finite element methods.
    int trial_degree = 0;
    int test_degree = 0;
    int multiplicity = 0;             ///< 1D interior knot multiplicity, 0: method default
    double penalty_scale = 1.0;

    /// Used by the CLI when no --out flag is given.
    std::string output_dir;

    /// Fills method-dependent defaults (widths, degrees, multiplicity, name).
    ExperimentConfig normalized() const;
};

/// Throws ConfigError on unknown keys, bad types or invalid combinations.
ExperimentConfig config_from_json(std::string_view text);
std::vector<ExperimentConfig> configs_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& config);

/// Checks method/dimension/mesh compatibility. Throws ConfigError.
void validate(const ExperimentConfig& config);

struct FemDiagnostics {
    std::optional<double> min_value;   ///< 1D only
    std::optional<double> max_value;   ///< 1D only
    /// 1D: u_h leaves [-kOscillationTolerance, 1 + kOscillationTolerance].
    std::optional<bool> oscillation;
    double max_norm = 0.0;
    std::optional<double> residual_norm;
};

struct TrainingSummary {
    long epochs = 0;
    double final_loss = 0.0;
    std::vector<LossComponent> final_components;
    Eigen::Index parameter_count = 0;
};

struct SolveReport {
    ExperimentConfig config;
    bool ok = false;
    int exit_code = 0;
    std::string error_type;
    std::string error_message;
    std::optional<double> rcond;
    std::optional<long> failed_epoch;

    ErrorNorms errors;
    std::optional<double> max_error_outside_layer;   ///< 1D, on [0, 1 - 2 eps]
    std::optional<FemDiagnostics> fem;
    std::optional<TrainingSummary> training;
    double wall_seconds = 0.0;

    std::filesystem::path directory;
    std::vector<std::string> files;

    /// Everything except timing; identical across reruns with the same seed.
    std::string payload_json() const;
    std::string to_json() const;
};

/// Runs one experiment and writes solution.csv, report.json and, for trained
/// methods, loss_history.csv and network.txt into `out_dir`.
/// Failures are reported in the returned value and report.json, not thrown,
/// except for ConfigError which is raised before any work.
SolveReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct SuiteRow {
    ExperimentConfig config;
    std::string status;
    ErrorNorms errors;
};

/// Runs every config in its own subdirectory and writes summary.csv.
/// `threads` experiments run concurrently; rows keep the input order.
std::vector<SuiteRow> run_suite(const std::vector<ExperimentConfig>& configs,
                                const std::filesystem::path& out_dir, int threads = 1);

/// Thread count from ADVDIFF_THREADS, or `fallback` if unset or invalid.
int thread_count_from_env(int fallback = 1);

/// Distance outside the exact solution's range [0, 1] at which a 1D FEM
/// solution is flagged as oscillating.
inline constexpr double kOscillationTolerance = 0.05;

inline constexpr const char* kThreadsEnv = "ADVDIFF_THREADS";

} // namespace advdiff
