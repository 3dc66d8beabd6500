#pragma once

// Command-line layer: run configuration, the subcommands and their artifacts.
// Core code works in natural units; energies are converted only when written.

#include "helitube/errors.hpp"
#include "helitube/geometry.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace helitube::cli {

/// Bad configuration value or file. Maps to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int { Ok = 0, VerifyFailed = 1, BadConfig = 2, SolverFailed = 3 };

struct KPath {
    double start = 0.0;
    double end = 0.0;
    std::size_t count = 101;
    double n = 0.0;

    std::vector<double> k_s_values() const;
};

struct Units {
    bool physical = false;
    /// Particle mass in kg (physical mode only).
    double mu = 0.0;

    /// Factor applied to energies on output: 1, or hbar^2 / (2 mu).
    double energy_scale() const;
    std::string label() const;
};

struct RunConfig {
    double kappa = 1.0;
    double tau = 1.0;
    double rho0 = 0.1;
    double s0 = 0.0;
    std::size_t n_s = 64;
    std::size_t n_phi = 64;
    int n_harmonics = 7;
    KPath kpath;
    std::vector<double> eps_sweep{0.01, 0.02, 0.03, 0.04, 0.05};
    std::filesystem::path out_dir = ".";
    Units units;
    /// Cell length along s; required when tau = 0.
    std::optional<double> s_period;
    /// Test hook: constant added to V_kin inside the operator-identity check.
    double corrupt_vkin = 0.0;

    /// Throws ConfigError (or the HelixSpec error) when invalid.
    HelixSpec spec() const;
    void validate() const;
};

/// Raw `key = value` entries. Later sources override earlier ones.
using Entries = std::map<std::string, std::string>;

/// Reads a config file: one `key = value` per line, `#` starts a comment.
Entries read_config_file(const std::filesystem::path& path);

/// Builds a validated RunConfig from entries. Unknown keys are rejected.
/// Recognized keys: kappa, tau, rho0, s0, grid (NxM), harmonics, kpath (a:b:n),
/// transverse_n, eps_sweep (comma list), out, units (natural | physical:<mu>),
/// s_period, corrupt_vkin.
RunConfig make_config(const Entries& entries);

/// "%.16e" (17 significant digits, lower-case exponent); "nan"/"inf" spelled out.
std::string format_number(double v);

/// Writes `content` to `path` via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

int cmd_geometry(const RunConfig& config);
int cmd_potential(const RunConfig& config);
int cmd_bands(const RunConfig& config);
int cmd_gap_scan(const RunConfig& config);
int cmd_cylinder_check(const RunConfig& config);
int cmd_verify(const RunConfig& config);

struct CylinderCheck {
    struct Row {
        int n = 0;
        double exact = 0.0;
        /// Oracle values at n_phi, 2 n_phi, 4 n_phi.
        std::vector<double> raw;
        double extrapolated = 0.0;
        double raw_rel_error = 0.0;
        double extrapolated_rel_error = 0.0;
    };
    std::vector<Row> rows;
    std::size_t n_s = 0;
    std::size_t n_phi = 0;
    double max_raw_rel_error = 0.0;
    double max_extrapolated_rel_error = 0.0;

    /// Extrapolated error <= 1e-6 or raw error <= 1e-3.
    bool pass() const { return max_extrapolated_rel_error <= 1e-6 || max_raw_rel_error <= 1e-3; }
};

/// Straight tube (kappa = 0) of the given radius and torsion: finite-difference
/// oracle at k_s = 0 for n = 0..3 against (n^2 - 1/4)/rho0^2, raw at n_phi and
/// Richardson-extrapolated over n_phi, 2 n_phi, 4 n_phi.
CylinderCheck run_cylinder_check(double rho0, double tau, std::size_t n_s, std::size_t n_phi,
                                 std::optional<double> s_period = std::nullopt);

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, char** argv);

}  // namespace helitube::cli
