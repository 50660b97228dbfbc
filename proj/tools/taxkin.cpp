// Command-line front end: run, sweep, compare, spread, validate.

#include "taxkin/error.hpp"
#include "taxkin/experiments.hpp"
#include "taxkin/io.hpp"
#include "taxkin/validation.hpp"
#include "taxkin/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace taxkin;

namespace {

constexpr int exit_engine_error = 1;
constexpr int exit_usage = 2;
constexpr int exit_check_failed = 3;

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<double> eta_pct;
    std::int64_t dump_stride = 0;
};

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunConfig resolve_config(const Options& opts)
{
    RunConfig rc;
    if (opts.config_path.empty()) {
        rc.model = reference_config();
    } else {
        rc = load_config(opts.config_path);
    }
    for (const auto& w : rc.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    return rc;
}

std::string to_text(const auto& writer)
{
    std::ostringstream os;
    writer(os);
    return os.str();
}

void finish(const fs::path& dir, const RunConfig& rc, const std::string& command, std::vector<std::string> outputs)
{
    RunManifest manifest{rc, command, std::move(outputs), utc_timestamp()};
    manifest.outputs.push_back("manifest.json");
    write_file(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
}

fs::path prepare_out(const Options& opts)
{
    fs::path dir(opts.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, ErrorCategory::io, "cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

int cmd_run(const Options& opts)
{
    RunConfig rc = resolve_config(opts);
    if (opts.dump_stride > 0) {
        rc.trajectory_stride = opts.dump_stride;
    }
    const fs::path dir = prepare_out(opts);
    std::vector<std::string> outputs{"state.csv", "metrics.json"};

    std::ofstream trajectory;
    TrajectoryObserver observer;
    const Eigen::Map<const Eigen::VectorXd> r(rc.model.incomes.data(), rc.model.classes());
    if (rc.trajectory_stride) {
        trajectory.open(dir / "trajectory.csv", std::ios::binary);
        require(static_cast<bool>(trajectory), ErrorCategory::io, "cannot write trajectory.csv");
        write_trajectory_header(trajectory, rc.model.classes(), rc.model.sectors());
        observer.stride = *rc.trajectory_stride;
        observer.callback = [&](double t, const PopulationState& x) {
            write_trajectory_row(trajectory, t, x, Eigen::VectorXd(r));
        };
        outputs.push_back("trajectory.csv");
    }

    const auto result = run_scenario(rc.model, rc.initial, rc.integration, rc.trajectory_stride ? &observer : nullptr);
    write_file(dir / "state.csv", to_text([&](std::ostream& os) { write_state_csv(os, result.stationary.state); }));
    auto metrics = to_json(result.metrics);
    metrics["converged"] = result.stationary.converged;
    metrics["final_time"] = result.stationary.final_time;
    metrics["residual"] = result.stationary.residual;
    metrics["steps"] = result.stationary.steps;
    write_file(dir / "metrics.json", metrics.dump(2) + "\n");
    finish(dir, rc, "run", outputs);

    std::cout << "converged: " << (result.stationary.converged ? "yes" : "no") << " at t = "
              << result.stationary.final_time << " (residual " << result.stationary.residual << ")\n"
              << "mu = " << format_report(result.metrics.mu_total)
              << ", gini = " << format_report(result.metrics.gini_total) << ", income gap d = "
              << (result.metrics.income_gap ? format_report(*result.metrics.income_gap) : "undefined") << '\n';
    return 0;
}

int cmd_sweep(const Options& opts)
{
    RunConfig rc = resolve_config(opts);
    if (!opts.eta_pct.empty()) {
        rc.sweep_etas.clear();
        for (double pct : opts.eta_pct) {
            rc.sweep_etas.push_back(pct / 100.0);
        }
    }
    const auto levels = rc.sweep_etas.empty() ? table_sweep_levels() : rc.sweep_etas;
    const fs::path dir = prepare_out(opts);

    const auto rows = evasion_sweep(rc.model, levels, rc.initial, rc.integration);
    write_file(dir / "sweep.csv", to_text([&](std::ostream& os) { write_sweep_csv(os, rows); }));
    std::cout << to_text([&](std::ostream& os) { write_sweep_csv(os, rows); });

    std::vector<std::string> outputs{"sweep.csv"};
    std::vector<std::pair<double, double>> points;
    for (const auto& row : rows) {
        if (row.converged) {
            points.emplace_back(row.eta, row.income_gap);
        }
    }
    try {
        const auto fit = fit_quadratic_through_origin(points);
        nlohmann::json j{{"quadratic", fit.quadratic}, {"linear", fit.linear}, {"points", points.size()}};
        write_file(dir / "fit.json", j.dump(2) + "\n");
        outputs.push_back("fit.json");
        std::cout << "fit: d(eta) ~ " << format_report(fit.quadratic) << " eta^2 + " << format_report(fit.linear)
                  << " eta\n";
    } catch (const Error& e) {
        if (e.category() != ErrorCategory::underdetermined_fit) {
            throw;
        }
        std::cerr << "note: no quadratic fit (" << e.detail() << ")\n";
    }
    rc.sweep_etas = levels;
    finish(dir, rc, "sweep", outputs);
    return 0;
}

int cmd_compare(const Options& opts)
{
    const RunConfig rc = resolve_config(opts);
    const fs::path dir = prepare_out(opts);
    const auto cmp = compare_compliance_vs_evasion(rc.model, rc.initial, rc.integration);
    const auto text = to_text([&](std::ostream& os) { write_compare_csv(os, cmp.delta); });
    write_file(dir / "compare.csv", text);
    std::cout << text;
    finish(dir, rc, "compare", {"compare.csv"});
    return 0;
}

int cmd_spread(const Options& opts)
{
    const RunConfig rc = resolve_config(opts);
    const fs::path dir = prepare_out(opts);
    const auto s = spread_comparison(rc.model, rc.initial, rc.integration);
    auto sectors = [](const std::vector<std::optional<double>>& v) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& g : v) {
            out.push_back(g ? nlohmann::json(*g) : nlohmann::json(nullptr));
        }
        return out;
    };
    nlohmann::json j{
        {"widespread", {{"theta_ev", {1.0, 0.75, 0.75}}, {"eta", s.eta_widespread}, {"gini_total", s.gini_widespread},
                        {"gini_per_sector", sectors(s.sector_gini_widespread)}}},
        {"concentrated", {{"theta_ev", {1.0, 1.0, 0.5}}, {"eta", s.eta_concentrated}, {"gini_total", s.gini_concentrated},
                          {"gini_per_sector", sectors(s.sector_gini_concentrated)}}},
    };
    write_file(dir / "spread.json", j.dump(2) + "\n");
    std::cout << "widespread   (1, .75, .75): gini = " << format_report(s.gini_widespread) << '\n'
              << "concentrated (1, 1, .5):    gini = " << format_report(s.gini_concentrated) << '\n';
    finish(dir, rc, "spread", {"spread.json"});
    return 0;
}

int cmd_validate(const Options& opts)
{
    const RunConfig rc = resolve_config(opts);
    const auto checks = run_invariant_suite(rc.model, rc.integration);
    bool all = true;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.passed;
    }
    return all ? 0 : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kinetic income-exchange model with taxation and heterogeneous tax evasion"};
    app.set_version_flag("--version", std::string(engine_version));
    app.require_subcommand(1);

    Options opts;
    bool seedless = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Config file (.json or .toml); reference setup if omitted")
            ->check(CLI::ExistingFile);
        sub->add_flag("--seedless", seedless, "Assert that no random numbers are used (always true)")
            ->disable_flag_override();
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str(); };

    auto* run = app.add_subcommand("run", "Integrate one scenario to stationarity");
    add_common(run);
    add_out(run);
    run->add_option("--dump-trajectory", opts.dump_stride, "Write trajectory.csv every STRIDE steps")
        ->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "Income gap versus total evasion level");
    add_common(sweep);
    add_out(sweep);
    sweep->add_option("--eta", opts.eta_pct, "Evasion levels in percent, e.g. 5,10,15")->delimiter(',');

    auto* compare = app.add_subcommand("compare", "Class distribution difference against full compliance");
    add_common(compare);
    add_out(compare);

    auto* spread = app.add_subcommand("spread", "Gini of widespread versus concentrated evasion");
    add_common(spread);
    add_out(spread);

    auto* validate_cmd = app.add_subcommand("validate", "Run the model invariant checks");
    add_common(validate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*run) {
            return cmd_run(opts);
        }
        if (*sweep) {
            return cmd_sweep(opts);
        }
        if (*compare) {
            return cmd_compare(opts);
        }
        if (*spread) {
            return cmd_spread(opts);
        }
        return cmd_validate(opts);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.category()) << "]: " << e.detail() << '\n';
        return exit_engine_error;
    }
}
