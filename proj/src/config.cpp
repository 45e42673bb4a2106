#include "lambda_decouple/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include "lambda_decouple/format.hpp"

namespace lambda_decouple {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T, typename Conv>
std::vector<T> to_list(const std::string& key, const std::string& v, Conv conv) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) {
        out.push_back(conv(key, item));
    }
    if (out.empty()) {
        throw ConfigError("config: '" + key + "' expects a non-empty comma-separated list");
    }
    return out;
}

Channel to_channel(const std::string& key, const std::string& v) {
    if (v == "k1") {
        return Channel::k1;
    }
    if (v == "k2") {
        return Channel::k2;
    }
    throw ConfigError("config: '" + key + "' expects k1 or k2, got '" + v + "'");
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F f) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? "," : "") + f(xs[i]);
    }
    return out;
}

std::string num(double v) {
    return format_significant(v, 12);
}

} // namespace

ConfigMap parse_config_text(std::string_view text) {
    ConfigMap map;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        }
        map[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
    }
    return map;
}

void apply_override(ConfigMap& map, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
    }
    map[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

RunConfig resolve_config(const ConfigMap& map) {
    if (map.count("temperature") && map.count("omega_c_over_T")) {
        throw ConfigError("config: temperature and omega_c_over_T are mutually exclusive");
    }
    if (map.count("delta_t") && map.count("t_total")) {
        throw ConfigError("config: delta_t and t_total are mutually exclusive");
    }

    RunConfig c;
    std::optional<double> temperature;
    std::optional<double> ratio;
    std::optional<double> t_total;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"alpha", [&](auto& k, auto& v) { c.alpha = to_double(k, v); }},
        {"n_index", [&](auto& k, auto& v) { c.n_index = to_double(k, v); }},
        {"omega_c", [&](auto& k, auto& v) { c.omega_c = to_double(k, v); }},
        {"temperature", [&](auto& k, auto& v) { temperature = to_double(k, v); }},
        {"omega_c_over_T", [&](auto& k, auto& v) { ratio = to_double(k, v); }},
        {"n_list", [&](auto& k, auto& v) { c.n_list = to_list<int>(k, v, to_int); }},
        {"t_max", [&](auto& k, auto& v) { c.t_max = to_double(k, v); }},
        {"t_points", [&](auto& k, auto& v) { c.t_points = to_int(k, v); }},
        {"slicing", [&](auto&, auto& v) { c.slicing = v; }},
        {"n_max", [&](auto& k, auto& v) { c.n_max = to_int(k, v); }},
        {"delta_t", [&](auto& k, auto& v) { c.delta_t = to_double(k, v); }},
        {"t_total", [&](auto& k, auto& v) { t_total = to_double(k, v); }},
        {"n_cycles", [&](auto& k, auto& v) { c.n_cycles = to_int(k, v); }},
        {"tau_p", [&](auto& k, auto& v) { c.tau_p = to_double(k, v); }},
        {"quiet_points", [&](auto& k, auto& v) { c.quiet_points = to_int(k, v); }},
        {"e0", [&](auto& k, auto& v) { c.e0 = to_double(k, v); }},
        {"e1", [&](auto& k, auto& v) { c.e1 = to_double(k, v); }},
        {"e2", [&](auto& k, auto& v) { c.e2 = to_double(k, v); }},
        {"oracle_omega", [&](auto& k, auto& v) { c.oracle_omega = to_double(k, v); }},
        {"oracle_g", [&](auto& k, auto& v) { c.oracle_g = to_double(k, v); }},
        {"oracle_cutoff", [&](auto& k, auto& v) { c.oracle_cutoff = to_int(k, v); }},
        {"oracle_theta", [&](auto& k, auto& v) { c.oracle_theta = to_double(k, v); }},
        {"oracle_temperatures",
         [&](auto& k, auto& v) { c.oracle_temperatures = to_list<double>(k, v, to_double); }},
        {"oracle_n_list", [&](auto& k, auto& v) { c.oracle_n_list = to_list<int>(k, v, to_int); }},
        {"oracle_channels",
         [&](auto& k, auto& v) { c.oracle_channels = to_list<Channel>(k, v, to_channel); }},
        {"perturb_h1", [&](auto& k, auto& v) { c.perturb_h1 = to_double(k, v); }},
    };

    for (const auto& [key, value] : map) {
        auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("config: unknown key '" + key + "'");
        }
        it->second(key, value);
    }

    if (!(c.omega_c > 0.0)) {
        throw ConfigError("config: omega_c must be > 0");
    }
    if (temperature) {
        c.temperature = *temperature;
    } else {
        const double r = ratio.value_or(100.0);
        if (!(r > 0.0)) {
            throw ConfigError("config: omega_c_over_T must be > 0 (use temperature=0 for zero temperature)");
        }
        c.temperature = c.omega_c / r;
    }
    if (t_total) {
        if (c.n_cycles < 1) {
            throw ConfigError("config: t_total requires n_cycles >= 1");
        }
        c.delta_t = *t_total / (3.0 * c.n_cycles);
    }
    if (c.slicing != "fixed_t" && c.slicing != "fixed_dt" && c.slicing != "both") {
        throw ConfigError("config: slicing must be fixed_t, fixed_dt or both");
    }
    if (c.t_points < 1 || c.n_max < 1 || c.quiet_points < 2) {
        throw ConfigError("config: t_points, n_max must be >= 1 and quiet_points >= 2");
    }
    return c;
}

BathSpectrum RunConfig::spectrum() const {
    return BathSpectrum::make(alpha, n_index, omega_c, temperature);
}

std::string RunConfig::echo() const {
    const std::map<std::string, std::string> kv = {
        {"alpha", num(alpha)},
        {"n_index", num(n_index)},
        {"omega_c", num(omega_c)},
        {"temperature", num(temperature)},
        {"n_list", join(n_list, [](int v) { return std::to_string(v); })},
        {"t_max", num(t_max)},
        {"t_points", std::to_string(t_points)},
        {"slicing", slicing},
        {"n_max", std::to_string(n_max)},
        {"delta_t", num(delta_t)},
        {"n_cycles", std::to_string(n_cycles)},
        {"tau_p", num(tau_p)},
        {"quiet_points", std::to_string(quiet_points)},
        {"e0", num(e0)},
        {"e1", num(e1)},
        {"e2", num(e2)},
        {"oracle_omega", num(oracle_omega)},
        {"oracle_g", num(oracle_g)},
        {"oracle_cutoff", std::to_string(oracle_cutoff)},
        {"oracle_theta", num(oracle_theta)},
        {"oracle_temperatures", join(oracle_temperatures, num)},
        {"oracle_n_list", join(oracle_n_list, [](int v) { return std::to_string(v); })},
        {"oracle_channels",
         join(oracle_channels, [](Channel ch) { return std::string(to_string(ch)); })},
        {"perturb_h1", num(perturb_h1)},
    };
    std::string out;
    for (const auto& [k, v] : kv) {
        out += "# " + k + "=" + v + "\n";
    }
    return out;
}

} // namespace lambda_decouple
