#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "advdiff/errors.hpp"
#include "advdiff/runner.hpp"

using namespace advdiff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "advdiff_runner_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ADVDIFF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig galerkin_config() {
    return config_from_json(
        R"({"method": "galerkin", "eps": 0.001, "mesh": {"kind": "uniform", "n_points": 11}})");
}

ExperimentConfig short_pinn(std::uint64_t seed) {
    ExperimentConfig c;
    c.method = Method::pinn;
    c.eps = 0.1;
    c.mesh_kind = MeshKind::uniform;
    c.n_points = 20;
    c.widths = {1, 8, 8, 1};
    c.epochs = 300;
    c.log_every = 100;
    c.seed = seed;
    return c;
}

} // namespace

TEST(Runner, MethodNamesRoundTrip) {
    for (auto m : {Method::galerkin, Method::resmin, Method::supg, Method::pinn,
                   Method::vpinn_strong, Method::vpinn_weak, Method::vpinn_both}) {
        EXPECT_EQ(parse_method(to_string(m)), m);
    }
    EXPECT_THROW(parse_method("fdm"), ConfigError);
    EXPECT_TRUE(is_trained(Method::vpinn_weak));
    EXPECT_FALSE(is_trained(Method::supg));
}

TEST(Runner, ConfigJsonRoundTrip) {
    const auto c = config_from_json(R"({"name": "a", "method": "vpinn_both", "dimension": 2,
        "eps": 0.01, "mesh": {"kind": "uniform", "n_points": 12}, "widths": [2, 7, 1],
        "lr": 0.002, "epochs": 17, "seed": 99, "log_every": 3, "quad_order": 2, "gamma": 0.5,
        "bc_weight": 2.0})");
    const auto back = config_from_json(config_to_json(c));
    EXPECT_EQ(back.name, "a");
    EXPECT_EQ(back.method, Method::vpinn_both);
    EXPECT_EQ(back.dimension, 2);
    EXPECT_EQ(back.eps, 0.01);
    EXPECT_EQ(back.mesh_kind, MeshKind::uniform);
    EXPECT_EQ(back.n_points, 12);
    EXPECT_EQ(back.widths, (std::vector<int>{2, 7, 1}));
    EXPECT_EQ(back.lr, 0.002);
    EXPECT_EQ(back.epochs, 17);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.log_every, 3);
    EXPECT_EQ(back.quad_order, 2);
    EXPECT_EQ(back.gamma, 0.5);
    EXPECT_EQ(back.bc_weight, 2.0);
}

TEST(Runner, NormalizedDefaults) {
    const auto pinn = config_from_json(R"({"method": "pinn", "dimension": 2})").normalized();
    EXPECT_EQ(pinn.widths, (std::vector<int>{2, 20, 20, 20, 20, 1}));
    EXPECT_FALSE(pinn.name.empty());
    const auto rm = config_from_json(R"({"method": "resmin"})").normalized();
    EXPECT_EQ(rm.trial_degree, 1);
    EXPECT_EQ(rm.test_degree, 2);
    const auto g = config_from_json(R"({"method": "galerkin"})").normalized();
    EXPECT_EQ(g.trial_degree, 2);
    EXPECT_EQ(g.multiplicity, 0);
}

TEST(Runner, RejectsInvalidConfigs) {
    EXPECT_THROW(config_from_json(R"({"eps": 0.1})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"method": "pinn", "colour": 1})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"method": "pinn", "eps": "small"})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"method": "pinn", "seed": -1})"), ConfigError);
    EXPECT_THROW(config_from_json(R"({"method": "pinn", "mesh": {"kind": "graded"}})"),
                 ConfigError);
    EXPECT_THROW(config_from_json("{"), ConfigError);
    EXPECT_THROW(configs_from_json(R"({"method": "pinn"})"), ConfigError);

    auto check = [](const std::string& text) {
        EXPECT_THROW(validate(config_from_json(text).normalized()), ConfigError) << text;
    };
    check(R"({"method": "supg", "dimension": 1})");
    check(R"({"method": "pinn", "dimension": 3})");
    check(R"({"method": "pinn", "eps": 0})");
    check(R"({"method": "pinn", "mesh": {"kind": "uniform", "n_points": 1}})");
    check(R"({"method": "pinn", "eps": 0.001, "mesh": {"kind": "adaptive", "n_points": 12}})");
    check(R"({"method": "pinn", "lr": -1})");
    check(R"({"method": "pinn", "epochs": 0})");
    check(R"({"method": "pinn", "widths": [2, 5, 1]})");
    check(R"({"method": "resmin", "trial_degree": 2, "test_degree": 1})");
    check(R"({"method": "supg", "dimension": 2, "trial_degree": 1})");
}

TEST(Runner, GalerkinReportFlagsOscillation) {
    const auto dir = scratch("galerkin");
    const auto r = run_experiment(galerkin_config(), dir);
    ASSERT_TRUE(r.ok) << r.error_message;
    ASSERT_TRUE(r.fem.has_value());
    EXPECT_TRUE(r.fem->oscillation.value());
    EXPECT_GT(*r.fem->max_value, 1.0 + kOscillationTolerance);
    for (const auto& f : {"solution.csv", "report.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const auto j = nlohmann::json::parse(read_file(dir / "report.json"));
    EXPECT_EQ(j["status"], "ok");
    EXPECT_EQ(j["exit_code"], 0);
    EXPECT_EQ(j["fem"]["oscillation"], true);
    EXPECT_EQ(j["config"]["method"], "galerkin");
    EXPECT_TRUE(j["errors"]["mse"].is_number());
    EXPECT_TRUE(j["timing"]["wall_seconds"].is_number());

    std::ifstream csv(dir / "solution.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "x,u_exact,u_numeric");
}

TEST(Runner, SmoothResminHasNoOscillation) {
    const auto c = config_from_json(
        R"({"method": "resmin", "eps": 0.1, "mesh": {"kind": "uniform", "n_points": 21}})");
    const auto r = run_experiment(c, scratch("resmin"));
    ASSERT_TRUE(r.ok);
    EXPECT_FALSE(r.fem->oscillation.value());
    EXPECT_TRUE(r.fem->residual_norm.has_value());
    EXPECT_LT(r.errors.l2, 0.05);
}

TEST(Runner, ShortPinnRunWritesArtifacts) {
    const auto dir = scratch("pinn");
    const auto r = run_experiment(short_pinn(1), dir);
    ASSERT_TRUE(r.ok) << r.error_message;
    ASSERT_TRUE(r.training.has_value());
    EXPECT_EQ(r.training->epochs, 300);
    EXPECT_EQ(r.training->parameter_count, MlpNetwork::count_parameters({1, 8, 8, 1}));
    for (const auto& f : {"solution.csv", "report.json", "loss_history.csv", "network.txt"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    std::ifstream hist(dir / "loss_history.csv");
    std::string header;
    std::getline(hist, header);
    EXPECT_EQ(header, "epoch,loss_total,loss_pde,loss_bc0,loss_bc1,seconds");
    int rows = 0;
    for (std::string line; std::getline(hist, line);) {
        ++rows;
    }
    EXPECT_EQ(rows, 4);
    std::ifstream net(dir / "network.txt");
    EXPECT_EQ(load_checkpoint(net).parameter_count(), r.training->parameter_count);
}

TEST(Runner, RerunsAreBitIdentical) {
    const auto a = run_experiment(short_pinn(5), scratch("det_a"));
    const auto b = run_experiment(short_pinn(5), scratch("det_b"));
    EXPECT_EQ(a.payload_json(), b.payload_json());
    EXPECT_EQ(read_file(a.directory / "network.txt"), read_file(b.directory / "network.txt"));
    const auto c = run_experiment(short_pinn(6), scratch("det_c"));
    EXPECT_NE(a.payload_json(), c.payload_json());
}

TEST(Runner, DivergentTrainingIsReported) {
    auto c = short_pinn(1);
    c.lr = 1e300;
    const auto dir = scratch("diverge");
    const auto r = run_experiment(c, dir);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_EQ(r.error_type, "non_finite");
    EXPECT_TRUE(r.failed_epoch.has_value());
    const auto j = nlohmann::json::parse(read_file(dir / "report.json"));
    EXPECT_EQ(j["status"], "failed");
    EXPECT_EQ(j["failure"]["type"], "non_finite");
}

TEST(Runner, SuiteWritesSummaryInInputOrder) {
    const auto dir = scratch("suite");
    std::vector<ExperimentConfig> configs = {galerkin_config(), short_pinn(2), short_pinn(3)};
    configs[1].name = "p2";
    configs[2].name = "p3";
    configs[2].lr = 1e300;
    const auto rows = run_suite(configs, dir, 2);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[1].status, "ok");
    EXPECT_EQ(rows[2].status, "non_finite");

    std::ifstream csv(dir / "summary.csv");
    std::vector<std::string> lines;
    for (std::string line; std::getline(csv, line);) {
        lines.push_back(line);
    }
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "name,method,dimension,eps,mesh,n_points,seed,mse,l2,max,status");
    EXPECT_EQ(lines[2].rfind("p2,pinn,1,", 0), 0u);
    EXPECT_NE(lines[3].find(",,,non_finite"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "001_p2" / "report.json"));
}

TEST(Runner, SuiteIsIndependentOfThreadCount) {
    std::vector<ExperimentConfig> configs = {short_pinn(7), short_pinn(8)};
    configs[0].name = "s7";
    configs[1].name = "s8";
    run_suite(configs, scratch("threads1"), 1);
    run_suite(configs, scratch("threads2"), 2);
    const auto base = fs::temp_directory_path() / "advdiff_runner_tests";
    EXPECT_EQ(read_file(base / "threads1" / "summary.csv"),
              read_file(base / "threads2" / "summary.csv"));
}

TEST(Runner, EmptySuiteWritesHeaderOnly) {
    const auto dir = scratch("empty");
    EXPECT_TRUE(run_suite({}, dir).empty());
    EXPECT_EQ(read_file(dir / "summary.csv"),
              "name,method,dimension,eps,mesh,n_points,seed,mse,l2,max,status\n");
}

TEST(Runner, ThreadCountFromEnvironment) {
    ::setenv(kThreadsEnv, "3", 1);
    EXPECT_EQ(thread_count_from_env(1), 3);
    ::setenv(kThreadsEnv, "zero", 1);
    EXPECT_EQ(thread_count_from_env(2), 2);
    ::unsetenv(kThreadsEnv);
    EXPECT_EQ(thread_count_from_env(4), 4);
}

TEST(Runner, CliExitCodes) {
    const auto dir = scratch("cli");
    write_file(dir / "ok.json",
               R"({"method": "galerkin", "eps": 0.1, "mesh": {"kind": "uniform", "n_points": 11}})");
    write_file(dir / "bad.json", R"({"method": "supg", "dimension": 1})");
    write_file(dir / "diverge.json",
               R"({"method": "pinn", "eps": 0.1, "lr": 1e300, "epochs": 50,
                   "widths": [1, 4, 1], "mesh": {"kind": "uniform", "n_points": 10}})");
    write_file(dir / "suite.json", "[]");

    EXPECT_EQ(run_cli("run " + (dir / "ok.json").string() + " --out " + (dir / "ok").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "report.json"));
    EXPECT_EQ(run_cli("run " + (dir / "bad.json").string() + " --out " + (dir / "bad").string()),
              2);
    EXPECT_EQ(run_cli("run " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("run " + (dir / "diverge.json").string() + " --out " +
                      (dir / "diverge").string()),
              3);
    EXPECT_EQ(run_cli("suite " + (dir / "suite.json").string() + " --out " +
                      (dir / "suite").string()),
              0);
    EXPECT_TRUE(fs::exists(dir / "suite" / "summary.csv"));
    EXPECT_NE(run_cli("frobnicate"), 0);
}
