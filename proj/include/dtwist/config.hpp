#pragma once

#include "dtwist/sequences.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dtwist {

struct Tolerances {
    double invariance = 1e-10;
    double linearity_deviation = 1e-11;
    double linearity_slope = 1e-10;
    double recurrence = 1e-13;
    double zero_seed = 1e-12;
    double jump = 1e-14;
    double offmidpoint_jump = 1e-8;
    double wandering = 1e-10;
    double inverse = 1e-12;
    double det = 1e-9;
    double twist = 1e-9;
    double periodicity = 1e-13;
    double phi_mean_slack = 1e-6;
    double conjugacy = 1e-10;
    double manifold = 1e-10;
    double ratio = 1e-10;
    double side = 1e-12;
    double collinearity = 1e-12;
    double convergence = 1e-6;
    double term_sum = 1e-6;
    double plateau = 1e-11;
};

struct RunConfig {
    SeqParams params;
    bool rigid = false;                 ///< replace g by the rigid rotation
    double quadrature_tolerance = 1e-13;
    Tolerances tol;

    std::string output_dir = "out";
    bool write_sequences = true;
    bool write_gaps = true;

    long verify_samples = 10000;
    std::uint64_t seed = 20240601;
    long rotation_n = 100000;
    long jump_samples = 10000;
    long structural_samples = 1000;

    int regularity_grid = 256;
    double c_factor = 0.0;              ///< 0 disables the comparison rebuild
    double min_c_ratio = 5.0;

    long portrait_orbits = 20;
    long portrait_steps = 10000;
    long portrait_curve_samples = 1000;
    double portrait_r_spread = 0.05;

    long manifold_k_max = 50;
    long manifold_family = 10;
    long convergence_n = 20;
    double convergence_s = 0.7;
    int segment_points = 17;

    std::vector<double> diffusion_offsets = {-1e-3};
    long diffusion_steps = 100000;
    long diffusion_gap = 1;
    double diffusion_position = 0.5625;  ///< theta0 = lambda_k + position * ell_k
};

/// Raised for malformed files, unknown keys and unparsable values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Applies one "section.key=value" assignment.
void apply_setting(RunConfig& c, const std::string& assignment);
void apply_setting(RunConfig& c, const std::string& key, const std::string& value);

/// INI text with sections [params] [tolerances] [output] [verify]
/// [regularity] [portrait] [manifolds] [diffusion]. Unknown keys throw.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// All keys in section.key form, in file order.
std::vector<std::string> config_keys();

/// Echo of every key with its effective value.
nlohmann::json config_json(const RunConfig& c);

/// The default configuration as INI text.
std::string default_config_ini();

} // namespace dtwist
