// config.hpp: flat key=value run configuration shared by every subcommand

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lambda_decouple/dephasing.hpp"

namespace lambda_decouple {

// Malformed or contradictory configuration (exit status 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ConfigMap = std::map<std::string, std::string>;

// Parses "key=value" lines; blank lines and lines starting with '#' are skipped.
ConfigMap parse_config_text(std::string_view text);

// Applies one "key=value" override (later wins).
void apply_override(ConfigMap& map, std::string_view assignment);

struct RunConfig {
    // Bath spectrum. Frequencies in units of omega_c by default.
    double alpha = 0.25;
    double n_index = 1.0;
    double omega_c = 1.0;
    double temperature = 0.01;  // resolved from temperature or omega_c_over_T

    // Dephasing curve.
    std::vector<int> n_list{1, 5, 15, 30};
    double t_max = 10.0;  // omega_c * t
    int t_points = 40;
    std::string slicing = "fixed_t";  // fixed_t | fixed_dt | both
    int n_max = 30;                   // fixed_dt slicing

    // Schedule.
    double delta_t = 1.0;
    int n_cycles = 1;
    double tau_p = 0.0;

    // Quiet-regime sweep.
    int quiet_points = 100;

    // Oracle suite. Temperatures are in units of the mode frequency.
    double e0 = 0.0;
    double e1 = 0.5;
    double e2 = 2.0;
    double oracle_omega = 1.0;
    double oracle_g = 0.05;
    int oracle_cutoff = 40;
    double oracle_theta = 0.5;  // omega * dt
    std::vector<double> oracle_temperatures{0.0, 0.2};
    std::vector<int> oracle_n_list{1, 3, 10};
    std::vector<Channel> oracle_channels{Channel::k1, Channel::k2};

    // Fault injection for verify-group: unitary tilt of h1 by this angle.
    double perturb_h1 = 0.0;

    BathSpectrum spectrum() const;

    // "# key=value" lines for every resolved parameter, sorted by key.
    std::string echo() const;
};

// Resolves a key/value map into a RunConfig. Unknown keys, unparsable values
// and mutually exclusive pairs (temperature / omega_c_over_T, delta_t /
// t_total) raise ConfigError.
RunConfig resolve_config(const ConfigMap& map);

} // namespace lambda_decouple
