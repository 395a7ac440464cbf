// Experiment configuration: a flat key = value file (TOML syntax subset:
// comments, strings, numbers, booleans, arrays of numbers) plus command-line
// overrides.  Unknown keys and out-of-range values are rejected with
// line/field diagnostics before any computation starts.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxplab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigValue {
    enum class Kind { string, number, boolean, number_list };
    Kind kind = Kind::string;
    std::string text;
    double number = 0.0;
    bool flag = false;
    std::vector<double> list;
    int line = 0;
};

// Parses `key = value` lines; '#' comments; blank lines ignored.
std::map<std::string, ConfigValue> parse_key_value_file(const std::string& path);
std::map<std::string, ConfigValue> parse_key_value_text(const std::string& text,
                                                        const std::string& origin);

struct ExperimentConfig {
    std::string experiment;        // subcommand name
    std::string init = "z2";       // z<n> | sigma:<theta_e>,<phi_e> | file:<path>
    int n_sites = 100;
    std::vector<double> epsilon{0.01};
    int n_realizations = 100;
    double horizon_periods = 40.0;
    int samples_per_period = 20;
    double horizon = 50.0;         // Sigma-return / Lyapunov horizon (time units)
    double t_end = 10.0;           // export-trajectory end time
    int n_samples = 256;           // export-trajectory sample count
    bool reduced = false;          // export the x = 0 angle representation
    int k_grid = 256;              // k samples for single-orbit classification
    int scan_k_grid = 48;          // k samples per scan row
    int n_theta = 200;
    int n_phi = 200;
    double rtol = 1e-10;
    double atol = 1e-12;
    double crossing_tol = 1e-10;
    double renorm_dt = 0.25;       // Lyapunov renormalization interval
    double threshold = 0.1;        // coherence threshold on <dS^2>/N
    double x_min = 0.3;            // collapse fit window start
    double collapse_x_lo = 0.0;    // collapse window override, 0 = automatic
    double collapse_x_hi = 0.0;
    std::uint64_t seed = 20260818;
    int workers = 0;               // 0 = hardware concurrency
    std::string output_dir = "out";

    // Applies values from a parsed file; rejects unknown keys.
    void apply(const std::map<std::string, ConfigValue>& kv);
    // Validates ranges; throws ConfigError naming the offending field.
    void validate() const;
    // Flat key -> printable value map, for the manifest echo.
    std::map<std::string, std::string> echo() const;
};

// Parsed form of the init descriptor.
struct InitSpec {
    enum class Kind { zn, sigma, file };
    Kind kind = Kind::zn;
    int n = 2;                     // zn
    double theta_e = 0.0, phi_e = 0.0;  // sigma
    std::string path;              // file
};

InitSpec parse_init(const std::string& text);

}  // namespace pxplab
