#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "kdl/bounds.hpp"
#include "kdl/minimax.hpp"
#include "kdl/model.hpp"
#include "kdl/solve.hpp"

namespace kdl::app {

/// Thrown for malformed configs: unknown keys, wrong types, bad expressions.
/// Carries the JSON path of the offending entry, e.g. "problem.f[1]".
class ConfigError : public PreconditionError {
public:
    ConfigError(const std::string& path, const std::string& message)
        : PreconditionError("config " + path + ": " + message), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct SolverConfig {
    std::uint64_t seed = 0;
    int starts = 64;
    double quad_tol = 1e-10;
    double grad_tol = 1e-10;
    int max_iter = 100000;
    int sweep = 512;
    int refine_points = 16;
    int max_rounds = 200;
    int path_nodes = 33;
    int string_iterations = 2000;
    double cert_tol = 1e-8;
    double tie_rel_tol = 1e-7;
    int ascent_iterations = 200;
    int ascent_patience = 20;
    unsigned jobs = 0;  // 0: available parallelism
};

struct ConstantsConfig {
    std::optional<double> eta1_target;
    double eta3_safety = 1.01;
    double sigma_margin = 0.05;
    double t_max = 1e3;
    int samples = 10000;
    double odd_tol = 1e-8;
    double oscillation_safety = 0.99;
};

struct OracleConfig {
    int points_per_dim = 201;
    int mu_points_per_dim = 21;
    std::optional<double> box_radius;  // default: gamma R*
};

struct Config {
    ProblemSpec problem;
    ConstantsConfig constants;
    SolverConfig solver;
    OracleConfig oracle;
    std::string output_dir = ".";

    /// Every field with defaults filled in; the hash is taken over this
    /// object minus solver.jobs and output.dir, which never change results.
    nlohmann::json normalized;
    std::string hash;  // hex SHA-256
};

Config parse_config(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& data);

QuadratureConfig quadrature_config(const Config& c);
CheckSettings check_settings(const Config& c);
BoundsSettings bounds_settings(const Config& c);
GapSettings gap_settings(const Config& c);
SolveSettings solve_settings(const Config& c);

}  // namespace kdl::app
