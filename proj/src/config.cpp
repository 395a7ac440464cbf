#include "pxplab/config.hpp"

#include "pxplab/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pxplab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& tok, const std::string& origin, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) fail(origin, line, "malformed number '" + tok + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(origin, line, "malformed number '" + tok + "'");
    }
}

ConfigValue parse_value(const std::string& raw, const std::string& origin, int line) {
    ConfigValue v;
    v.line = line;
    if (raw.empty()) fail(origin, line, "missing value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            fail(origin, line, "unterminated string");
        v.kind = ConfigValue::Kind::string;
        v.text = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') fail(origin, line, "unterminated array");
        v.kind = ConfigValue::Kind::number_list;
        std::string body = raw.substr(1, raw.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(origin, line, "empty array element");
            v.list.push_back(parse_number(item, origin, line));
        }
        if (v.list.empty()) fail(origin, line, "empty array");
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = ConfigValue::Kind::boolean;
        v.flag = raw == "true";
        return v;
    }
    v.kind = ConfigValue::Kind::number;
    v.number = parse_number(raw, origin, line);
    return v;
}

}  // namespace

std::map<std::string, ConfigValue> parse_key_value_text(const std::string& text,
                                                        const std::string& origin) {
    std::map<std::string, ConfigValue> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        // Strip comments outside strings.
        bool in_string = false;
        std::string stripped;
        for (char c : line) {
            if (c == '"') in_string = !in_string;
            if (c == '#' && !in_string) break;
            stripped += c;
        }
        stripped = trim(stripped);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key");
        for (char c : key)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                fail(origin, lineno, "invalid key '" + key + "'");
        if (out.count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
        out[key] = parse_value(val, origin, lineno);
    }
    return out;
}

std::map<std::string, ConfigValue> parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_value_text(ss.str(), path);
}

namespace {

[[noreturn]] void bad_field(const std::string& key, const ConfigValue& v, const char* expected) {
    throw ConfigError("config key '" + key + "' (line " + std::to_string(v.line) + "): expected " +
                      expected);
}

int as_int(const std::string& key, const ConfigValue& v) {
    if (v.kind != ConfigValue::Kind::number || v.number != std::floor(v.number))
        bad_field(key, v, "an integer");
    return static_cast<int>(v.number);
}

double as_real(const std::string& key, const ConfigValue& v) {
    if (v.kind != ConfigValue::Kind::number) bad_field(key, v, "a number");
    return v.number;
}

std::string as_string(const std::string& key, const ConfigValue& v) {
    if (v.kind != ConfigValue::Kind::string) bad_field(key, v, "a quoted string");
    return v.text;
}

bool as_bool(const std::string& key, const ConfigValue& v) {
    if (v.kind != ConfigValue::Kind::boolean) bad_field(key, v, "true or false");
    return v.flag;
}

std::vector<double> as_list(const std::string& key, const ConfigValue& v) {
    if (v.kind == ConfigValue::Kind::number) return {v.number};
    if (v.kind != ConfigValue::Kind::number_list) bad_field(key, v, "an array of numbers");
    return v.list;
}

}  // namespace

void ExperimentConfig::apply(const std::map<std::string, ConfigValue>& kv) {
    for (const auto& [key, v] : kv) {
        if (key == "experiment") experiment = as_string(key, v);
        else if (key == "init") init = as_string(key, v);
        else if (key == "n_sites") n_sites = as_int(key, v);
        else if (key == "epsilon") epsilon = as_list(key, v);
        else if (key == "n_realizations") n_realizations = as_int(key, v);
        else if (key == "horizon_periods") horizon_periods = as_real(key, v);
        else if (key == "samples_per_period") samples_per_period = as_int(key, v);
        else if (key == "horizon") horizon = as_real(key, v);
        else if (key == "t_end") t_end = as_real(key, v);
        else if (key == "n_samples") n_samples = as_int(key, v);
        else if (key == "reduced") reduced = as_bool(key, v);
        else if (key == "k_grid") k_grid = as_int(key, v);
        else if (key == "scan_k_grid") scan_k_grid = as_int(key, v);
        else if (key == "n_theta") n_theta = as_int(key, v);
        else if (key == "n_phi") n_phi = as_int(key, v);
        else if (key == "rtol") rtol = as_real(key, v);
        else if (key == "atol") atol = as_real(key, v);
        else if (key == "crossing_tol") crossing_tol = as_real(key, v);
        else if (key == "renorm_dt") renorm_dt = as_real(key, v);
        else if (key == "threshold") threshold = as_real(key, v);
        else if (key == "x_min") x_min = as_real(key, v);
        else if (key == "collapse_x_lo") collapse_x_lo = as_real(key, v);
        else if (key == "collapse_x_hi") collapse_x_hi = as_real(key, v);
        else if (key == "seed") {
            if (v.kind != ConfigValue::Kind::number || v.number < 0 ||
                v.number != std::floor(v.number))
                bad_field(key, v, "a non-negative integer");
            seed = static_cast<std::uint64_t>(v.number);
        } else if (key == "workers") workers = as_int(key, v);
        else if (key == "output_dir") output_dir = as_string(key, v);
        else throw ConfigError("unknown config key '" + key + "' (line " +
                               std::to_string(v.line) + ")");
    }
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("invalid config: ") + what);
    };
    require(n_sites >= 2 && n_sites <= 100000, "n_sites must be in [2, 100000]");
    require(!epsilon.empty(), "epsilon list must not be empty");
    for (double e : epsilon) require(e > 0 && e < 0.3, "epsilon entries must lie in (0, 0.3)");
    require(n_realizations >= 20, "n_realizations must be >= 20");
    require(horizon_periods > 0, "horizon_periods must be positive");
    require(samples_per_period >= 1, "samples_per_period must be >= 1");
    require(horizon > 0, "horizon must be positive");
    require(t_end != 0, "t_end must be nonzero");
    require(n_samples >= 2, "n_samples must be >= 2");
    require(k_grid >= 2 && k_grid <= 100000, "k_grid must be in [2, 100000]");
    require(scan_k_grid >= 2 && scan_k_grid <= 100000, "scan_k_grid must be in [2, 100000]");
    require(n_theta >= 2 && n_phi >= 2, "scan grid must be at least 2x2");
    require(n_theta <= 5000 && n_phi <= 5000, "scan grid too large");
    require(rtol > 0 && rtol < 1, "rtol must lie in (0, 1)");
    require(atol > 0 && atol < 1, "atol must lie in (0, 1)");
    require(crossing_tol > 0, "crossing_tol must be positive");
    require(renorm_dt > 0, "renorm_dt must be positive");
    require(threshold >= 0, "threshold must be non-negative");
    require(x_min >= 0, "x_min must be non-negative");
    require(collapse_x_lo >= 0 && collapse_x_hi >= 0, "collapse window bounds must be non-negative");
    require(collapse_x_hi == 0 || collapse_x_hi > collapse_x_lo,
            "collapse_x_hi must exceed collapse_x_lo");
    require(workers >= 0 && workers <= 4096, "workers must be in [0, 4096]");
    require(!output_dir.empty(), "output_dir must not be empty");
    parse_init(init);
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> m;
    m["experiment"] = experiment;
    m["init"] = init;
    m["n_sites"] = csv::integer(n_sites);
    {
        std::string eps;
        for (std::size_t i = 0; i < epsilon.size(); ++i) {
            if (i) eps += ",";
            eps += csv::real(epsilon[i]);
        }
        m["epsilon"] = eps;
    }
    m["n_realizations"] = csv::integer(n_realizations);
    m["horizon_periods"] = csv::real(horizon_periods);
    m["samples_per_period"] = csv::integer(samples_per_period);
    m["horizon"] = csv::real(horizon);
    m["t_end"] = csv::real(t_end);
    m["n_samples"] = csv::integer(n_samples);
    m["reduced"] = csv::boolean(reduced);
    m["k_grid"] = csv::integer(k_grid);
    m["scan_k_grid"] = csv::integer(scan_k_grid);
    m["n_theta"] = csv::integer(n_theta);
    m["n_phi"] = csv::integer(n_phi);
    m["rtol"] = csv::real(rtol);
    m["atol"] = csv::real(atol);
    m["crossing_tol"] = csv::real(crossing_tol);
    m["renorm_dt"] = csv::real(renorm_dt);
    m["threshold"] = csv::real(threshold);
    m["x_min"] = csv::real(x_min);
    m["collapse_x_lo"] = csv::real(collapse_x_lo);
    m["collapse_x_hi"] = csv::real(collapse_x_hi);
    m["seed"] = csv::integer(static_cast<long long>(seed));
    m["workers"] = csv::integer(workers);
    m["output_dir"] = output_dir;
    return m;
}

InitSpec parse_init(const std::string& text) {
    InitSpec spec;
    if (text.size() >= 2 && text[0] == 'z' && std::isdigit(static_cast<unsigned char>(text[1]))) {
        spec.kind = InitSpec::Kind::zn;
        try {
            std::size_t used = 0;
            spec.n = std::stoi(text.substr(1), &used);
            if (used != text.size() - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("invalid init '" + text + "'");
        }
        if (spec.n < 2 || spec.n > 64) throw ConfigError("init z<n>: n must lie in [2, 64]");
        return spec;
    }
    if (text.rfind("sigma:", 0) == 0) {
        spec.kind = InitSpec::Kind::sigma;
        const std::string body = text.substr(6);
        const std::size_t comma = body.find(',');
        if (comma == std::string::npos)
            throw ConfigError("init sigma: expected sigma:<theta_e>,<phi_e>");
        try {
            std::size_t u1 = 0, u2 = 0;
            const std::string a = body.substr(0, comma), b = body.substr(comma + 1);
            spec.theta_e = std::stod(a, &u1);
            spec.phi_e = std::stod(b, &u2);
            if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("init sigma: malformed coordinates in '" + text + "'");
        }
        return spec;
    }
    if (text.rfind("file:", 0) == 0) {
        spec.kind = InitSpec::Kind::file;
        spec.path = text.substr(5);
        if (spec.path.empty()) throw ConfigError("init file: empty path");
        return spec;
    }
    throw ConfigError("invalid init '" + text + "' (expected z<n>, sigma:<theta>,<phi>, or file:<path>)");
}

}  // namespace pxplab
