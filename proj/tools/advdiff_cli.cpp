#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "advdiff/errors.hpp"
#include "advdiff/runner.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kFailureExit = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw advdiff::ConfigError(fmt::format("cannot read '{}'", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_command(const std::string& config_path, const std::string& out) {
    const auto config = advdiff::config_from_json(read_file(config_path));
    std::filesystem::path dir = out;
    if (dir.empty()) {
        dir = config.output_dir.empty() ? std::filesystem::path("advdiff_out") /
                                              config.normalized().name
                                        : std::filesystem::path(config.output_dir);
    }
    const auto report = advdiff::run_experiment(config, dir);
    if (report.ok) {
        std::cout << fmt::format("{}: mse {:.6g}  l2 {:.6g}  max {:.6g}  ({:.2f} s)\n",
                                 report.config.name, report.errors.mse, report.errors.l2,
                                 report.errors.max, report.wall_seconds);
    } else {
        std::cerr << fmt::format("{}: {}: {}\n", report.config.name, report.error_type,
                                 report.error_message);
    }
    std::cout << "report: " << (dir / "report.json").string() << '\n';
    return report.exit_code;
}

int suite_command(const std::string& suite_path, const std::string& out) {
    const auto configs = advdiff::configs_from_json(read_file(suite_path));
    const std::filesystem::path dir = out.empty() ? std::filesystem::path("advdiff_out") : std::filesystem::path(out);
    const int threads = advdiff::thread_count_from_env(1);
    const auto rows = advdiff::run_suite(configs, dir, threads);
    int failed = 0;
    for (const auto& row : rows) {
        std::cout << fmt::format("{:<48} {:<8} mse {:.6g}\n", row.config.name, row.status,
                                 row.errors.mse);
        failed += row.status == "ok" ? 0 : 1;
    }
    std::cout << "summary: " << (dir / "summary.csv").string() << '\n';
    return failed == 0 ? 0 : kFailureExit;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Advection-diffusion solvers: B-spline FEM, PINN and VPINN"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    run->add_option("config", config_path, "Experiment config (JSON object)")->required();
    run->add_option("--out", out, "Output directory");

    std::string suite_path;
    auto* suite = app.add_subcommand(
        "suite", fmt::format("Run a JSON array of configs; {} sets the number of concurrent runs",
                             advdiff::kThreadsEnv));
    suite->add_option("configs", suite_path, "Suite file (JSON array)")->required();
    suite->add_option("--out", out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    try {
        if (run->parsed()) {
            return run_command(config_path, out);
        }
        return suite_command(suite_path, out);
    } catch (const advdiff::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailureExit;
    }
}
