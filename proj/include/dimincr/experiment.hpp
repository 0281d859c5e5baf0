#pragma once

#include "dimincr/config.hpp"
#include "dimincr/detection.hpp"
#include "dimincr/metrics.hpp"
#include "dimincr/test_functions.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dimincr {

struct RunRecord {
    std::string run; // repetition number or aggregate label
    std::size_t s = 0;
    std::string method, strategy;
    std::uint64_t samples = 0;
    double seconds = 0.0;
    double rel_l2 = 0.0, linf = 0.0, l2 = 0.0, l1 = 0.0;
    double success = 0.0; // 0/1 per run, success fraction on aggregate rows
    std::vector<StepStats> steps; // per-step counters (JSON output only)
};

struct SweepResult {
    std::vector<RunRecord> rows; // raw rows followed by per-s aggregates
};

struct RecoverReport {
    struct PerSparsity {
        std::size_t s = 0;
        int trials = 0;
        int successes = 0;
        double rate = 0.0;
    };
    std::vector<PerSparsity> rates;
    std::vector<RunRecord> rows;
    double overall_rate = 0.0;
};

struct OracleReport {
    std::size_t s = 0;
    double residual = 0.0;
    IndexSet indices;
};

ProductBasis build_basis(const ExperimentConfig& cfg);
KnownCoefficientFunction build_function(const ExperimentConfig& cfg, std::uint64_t run_seed);
AlgorithmParams build_params(const ExperimentConfig& cfg, std::size_t s, std::uint64_t run_seed);

// one run for each (s, repetition) with derived seeds, plus aggregate rows
// (median, quartiles, count of 1.5 IQR outliers above the upper quartile)
SweepResult cmd_approximate(const ExperimentConfig& cfg);

// exact-support recovery rate over seeded repetitions of sparse-random draws
RecoverReport cmd_recover_sparse(const ExperimentConfig& cfg);

// best-s-term benchmark over the search space
OracleReport cmd_oracle(const ExperimentConfig& cfg, std::size_t s);

std::string to_csv(const std::vector<RunRecord>& rows);
std::string to_json_records(const std::vector<RunRecord>& rows);
std::string oracle_to_json(const OracleReport& report);

} // namespace dimincr
