#pragma once

#include "taxkin/config.hpp"
#include "taxkin/experiments.hpp"
#include "taxkin/integrator.hpp"
#include "taxkin/metrics.hpp"
#include "taxkin/state.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace taxkin {

/// Everything a command needs, as read from a config file or a manifest.
struct RunConfig {
    ModelConfig model;
    IntegrationOptions integration;
    InitialConditionSpec initial;
    std::vector<double> sweep_etas;                   // fractions; empty means the reference grid
    std::optional<std::int64_t> trajectory_stride;
    std::vector<std::string> warnings;
};

/// Reads a JSON (.json) or TOML-style (.toml, .cfg, .conf, .ini) document and
/// validates it. A manifest written by the CLI is accepted as well: its
/// embedded "config" object is used.
RunConfig load_config(const std::filesystem::path& path);

/// Interprets an already parsed document (nested objects or dotted keys).
RunConfig parse_config(const nlohmann::json& document);

/// Flat `key = value` documents with `[section]` headers, `#` comments,
/// numbers, `a/b` fractions, strings, booleans and (nested, multi-line)
/// arrays. Produces the equivalent JSON object.
nlohmann::json parse_toml_like(std::string_view text);

/// Resolved configuration in the same schema `parse_config` reads.
nlohmann::json to_json(const RunConfig& config);

nlohmann::json to_json(const MetricsReport& report);

struct RunManifest {
    RunConfig config;
    std::string command;
    std::vector<std::string> outputs;
    std::string timestamp;
};

nlohmann::json to_json(const RunManifest& manifest);

/// Locale-independent shortest round-trip rendering.
std::string format_full(double value);
/// Locale-independent rendering with 4 significant digits.
std::string format_report(double value);

void write_state_csv(std::ostream& out, const PopulationState& x);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_compare_csv(std::ostream& out, const Eigen::VectorXd& delta);

/// Header line for a trajectory dump: t, x_<j>_<alpha>..., sum_x, mu.
void write_trajectory_header(std::ostream& out, int classes, int sectors);
void write_trajectory_row(std::ostream& out, double t, const PopulationState& x, const Eigen::VectorXd& incomes);

/// Writes `text` to `path`, throwing Error(io) on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace taxkin
