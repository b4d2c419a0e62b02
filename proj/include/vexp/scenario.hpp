#pragma once

#include "vexp/common.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vexp {

/// Schema violations; the message starts with the dotted field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline constexpr int schema_version = 1;

enum class Command { norms, audit, lambda_star, solve };
enum class Mode { hj1, hj2, automatic };

const char* to_string(Command c) noexcept;
const char* to_string(Mode m) noexcept;
/// "norms", "audit", "lambda-star", "solve"; throws ConfigError otherwise.
Command parse_command(std::string_view name);

struct GridSpec {
    int dimension = 1;
    std::vector<std::pair<double, double>> bounds{{0.0, 1.0}};
    std::vector<std::size_t> nodes{129};
};

struct PotentialSpec {
    /// j1 | j2 | quartic | zero | power | exponent_power
    std::string preset = "j2";
    double mu = 1.0;
    double sigma = 1.0;
    double q_plus = 4.0;
    double coef = 1.0;
    double nu = 2.0;
};

struct SolverSpec {
    int path_nodes = 17;
    int max_iters = 2000;
    double tol = 1e-8;
    double certify_tol = 1e-6;
    int polish_every = 10;
    int redistribute_every = 10;
    int restarts = 4;
    int lambda_star_max_iters = 2000;
    std::uint64_t seed = 1;
    std::vector<double> rho_grid{0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
    int samples_per_sphere = 16;
};

struct AuditSpec {
    std::optional<double> nu;       ///< default: declared growth exponent
    double M = 2.0;
    double tang_c = 1e-3;
    std::optional<double> mu_claim; ///< default: the potential's local mu
    double t_max = 1e3;
    std::optional<int> dimension;   ///< N for p_hat_star; default: grid dimension
};

struct FarPointSpec {
    std::string profile = "sine(1)";
    double t_max = 1024.0;
    /// Far point used by the Hj1 pipeline.
    std::optional<std::string> u_bar;
};

struct ScenarioConfig {
    GridSpec grid;
    std::string exponent = "constant(2)";
    double lambda = 0.0;
    PotentialSpec potential;
    std::string function = "sine(1)";
    Mode mode = Mode::automatic;
    SolverSpec solver;
    AuditSpec audit;
    FarPointSpec far_point;
    std::string output_dir = ".";
};

/// Parses the JSON configuration. Unknown keys and type errors raise
/// ConfigError naming the field; syntax errors carry line and column.
ScenarioConfig parse_config(std::string_view text);

struct ScenarioOutcome {
    /// 0 ok, 1 configuration or I/O, 2 audit failure, 3 non-convergence.
    int exit_code = 0;
    /// Deterministic JSON document (schema_version 1).
    std::string summary;
    /// Solution CSV with header x[,y],u; empty unless solving.
    std::string csv;
};

ScenarioOutcome run_scenario(const ScenarioConfig& config, Command command);

/// Writes <command>.json and, when present, solution.csv into `dir`.
/// Throws Error on I/O failure.
void write_outputs(const ScenarioOutcome& outcome, Command command, const std::string& dir);

} // namespace vexp
