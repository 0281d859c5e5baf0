#pragma once

#include "dimincr/detection.hpp"
#include "dimincr/search_space.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dimincr {

struct FunctionSpec {
    std::string name = "periodic10d"; // periodic10d | cheb-analytic | sparse-random
    // sparse-random
    std::size_t s_star = 10;
    double cmin = 1.0, cmax = 10.0;
    std::uint64_t seed = 0; // 0: derived from the master seed
    // cheb-analytic
    std::vector<int> dims_a, dims_b; // empty: odd/even split
    double a1 = 2.0, a2 = 3.0;
};

struct ExperimentConfig {
    std::string basis = "fourier";
    FunctionSpec function;
    std::optional<SearchSpace> space;
    std::string method = "r1l";
    Strategy strategy = Strategy::OneByOne;
    std::vector<std::size_t> s_list;
    double s_local_factor = 1.2; // s_local = ceil(factor * s)
    int r = 5;
    double delta_plus = 1e-12;
    int runs = 10;
    std::uint64_t seed = 0;
    bool recompute_final = false;
    bool record_timing = true; // false: seconds column written as zero
    std::string output;        // empty: stdout
    std::string format = "csv";
    std::int64_t lattice_M_cap = 100'000'000;
    std::size_t enumeration_limit = 10'000'000;
    double recover_tol = 1e-8;

    void validate() const;
};

// flat "key = value" text with one level of "name { ... }" blocks; '#' comments
std::map<std::string, std::string> parse_flat_text(const std::string& text);
// JSON mirror of the same keys (one nesting level)
std::map<std::string, std::string> parse_flat_json(const std::string& text);

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> load_config_map(const std::string& path);
ExperimentConfig load_config_file(const std::string& path);

// "space.n=8" / "method=mc" style override
void apply_override(std::map<std::string, std::string>& kv, const std::string& assignment);

} // namespace dimincr
