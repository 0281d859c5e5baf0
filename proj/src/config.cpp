#include "dimincr/config.hpp"

#include "dimincr/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace dimincr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok)
        out.push_back(tok);
    return out;
}

} // namespace

std::map<std::string, std::string> parse_flat_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line, prefix;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.back() == '{') {
            if (!prefix.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": nested blocks are not supported");
            prefix = trim(line.substr(0, line.size() - 1));
            if (prefix.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": unnamed block");
            continue;
        }
        if (line == "}") {
            if (prefix.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": stray '}'");
            prefix.clear();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv[prefix.empty() ? key : prefix + "." + key] = value;
    }
    if (!prefix.empty())
        throw ConfigError("config: unterminated block '" + prefix + "'");
    return kv;
}

std::map<std::string, std::string> parse_flat_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::map<std::string, std::string> kv;
    auto to_text = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_array()) {
            std::string s;
            for (const auto& e : v) {
                if (!s.empty()) s += ' ';
                s += e.is_string() ? e.get<std::string>() : e.dump();
            }
            return s;
        }
        return v.dump();
    };
    for (const auto& [key, value] : j.items()) {
        if (value.is_object()) {
            for (const auto& [sub, subval] : value.items())
                kv[key + "." + sub] = to_text(subval);
        } else {
            kv[key] = to_text(value);
        }
    }
    return kv;
}

void apply_override(std::map<std::string, std::string>& kv, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> space_kv;

    for (const auto& [key, value] : kv) {
        if (key.rfind("space.", 0) == 0) {
            space_kv[key.substr(6)] = value;
        } else if (key == "basis") {
            cfg.basis = value;
        } else if (key == "function") {
            cfg.function.name = value;
        } else if (key.rfind("function.", 0) == 0) {
            const std::string sub = key.substr(9);
            if (sub == "name") cfg.function.name = value;
            else if (sub == "s_star") cfg.function.s_star = std::stoull(value);
            else if (sub == "cmin") cfg.function.cmin = std::stod(value);
            else if (sub == "cmax") cfg.function.cmax = std::stod(value);
            else if (sub == "seed") cfg.function.seed = std::stoull(value);
            else if (sub == "a1") cfg.function.a1 = std::stod(value);
            else if (sub == "a2") cfg.function.a2 = std::stod(value);
            else if (sub == "dims_a" || sub == "dims_b") {
                std::vector<int> dims;
                for (const auto& tok : split_ws(value))
                    dims.push_back(std::stoi(tok));
                (sub == "dims_a" ? cfg.function.dims_a : cfg.function.dims_b) = std::move(dims);
            } else {
                throw ConfigError("config: unknown function key '" + sub + "'");
            }
        } else if (key == "method") {
            cfg.method = value;
        } else if (key == "strategy") {
            cfg.strategy = strategy_from_string(value);
        } else if (key == "s") {
            cfg.s_list.clear();
            for (const auto& tok : split_ws(value))
                cfg.s_list.push_back(std::stoull(tok));
        } else if (key == "s_local_factor") {
            cfg.s_local_factor = std::stod(value);
        } else if (key == "r") {
            cfg.r = std::stoi(value);
        } else if (key == "delta_plus") {
            cfg.delta_plus = std::stod(value);
        } else if (key == "runs") {
            cfg.runs = std::stoi(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "recompute_final") {
            cfg.recompute_final = parse_bool(value, key);
        } else if (key == "timing") {
            cfg.record_timing = (value == "wall");
            if (value != "wall" && value != "none")
                throw ConfigError("config: timing must be 'wall' or 'none'");
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "format") {
            cfg.format = value;
        } else if (key == "lattice_M_cap") {
            cfg.lattice_M_cap = std::stoll(value);
        } else if (key == "enumeration_limit") {
            cfg.enumeration_limit = std::stoull(value);
        } else if (key == "recover_tol") {
            cfg.recover_tol = std::stod(value);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    if (!space_kv.empty())
        cfg.space = space_from_config_block(space_kv);
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (!space)
        throw ConfigError("config: missing space block");
    if (s_list.empty())
        throw ConfigError("config: missing sparsity sweep 's'");
    for (std::size_t s : s_list)
        if (s < 1) throw ConfigError("config: sparsity values must be >= 1");
    if (runs < 1) throw ConfigError("config: runs must be >= 1");
    if (r < 1) throw ConfigError("config: r must be >= 1");
    if (!(delta_plus > 0.0)) throw ConfigError("config: delta_plus must be positive");
    if (s_local_factor < 1.0) throw ConfigError("config: s_local_factor must be >= 1");
    if (format != "csv" && format != "json")
        throw ConfigError("config: format must be csv or json");

    const auto& m = get_method(method);
    if (!m.required_basis.empty() && m.required_basis != basis)
        throw ConfigError("config: method '" + method + "' requires basis '" + m.required_basis + "'");
    if (basis == "chebyshev" && space->is_signed())
        throw ConfigError("config: chebyshev basis requires an unsigned (natural-number) space");
    if (function.name == "periodic10d") {
        if (basis != "fourier" || space->dimension() != 10)
            throw ConfigError("config: periodic10d needs the fourier basis and d = 10");
    } else if (function.name == "cheb-analytic") {
        if (basis != "chebyshev")
            throw ConfigError("config: cheb-analytic needs the chebyshev basis");
        if (!(function.a1 > 1.0) || !(function.a2 > 1.0))
            throw ConfigError("config: cheb-analytic parameters a1, a2 must exceed 1");
    } else if (function.name == "sparse-random") {
        if (function.s_star < 1)
            throw ConfigError("config: sparse-random needs s_star >= 1");
        if (!(function.cmin > 0.0) || function.cmax < function.cmin)
            throw ConfigError("config: sparse-random magnitude range invalid");
    } else {
        throw ConfigError("config: unknown function '" + function.name + "'");
    }
}

std::map<std::string, std::string> load_config_map(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    const bool json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
    return json ? parse_flat_json(text) : parse_flat_text(text);
}

ExperimentConfig load_config_file(const std::string& path) {
    return config_from_map(load_config_map(path));
}

} // namespace dimincr
