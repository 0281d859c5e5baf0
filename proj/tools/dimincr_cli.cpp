// Command-line harness: detection sweeps, sparse recovery rates, theory
// bounds and best-s-term oracles over a config file.

#include "dimincr/config.hpp"
#include "dimincr/errors.hpp"
#include "dimincr/experiment.hpp"
#include "dimincr/theory.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace dimincr;

ExperimentConfig load_with_overrides(const std::string& path,
                                     const std::vector<std::string>& overrides) {
    auto kv = load_config_map(path);
    for (const auto& assignment : overrides)
        apply_override(kv, assignment);
    return config_from_map(kv);
}

void write_or_print(const std::string& payload, const std::string& path) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write output file '" + path + "'");
    out << payload;
}

int run_approximate(const std::string& config_path, const std::vector<std::string>& overrides) {
    const ExperimentConfig cfg = load_with_overrides(config_path, overrides);
    const SweepResult result = cmd_approximate(cfg);
    write_or_print(cfg.format == "json" ? to_json_records(result.rows) : to_csv(result.rows),
                   cfg.output);
    return 0;
}

int run_recover(const std::string& config_path, const std::vector<std::string>& overrides) {
    const ExperimentConfig cfg = load_with_overrides(config_path, overrides);
    const RecoverReport report = cmd_recover_sparse(cfg);
    for (const auto& per : report.rates)
        std::printf("s=%zu: %d/%d exact recoveries (rate %.3f)\n", per.s, per.successes, per.trials,
                    per.rate);
    std::printf("overall rate %.3f\n", report.overall_rate);
    if (!cfg.output.empty())
        write_or_print(cfg.format == "json" ? to_json_records(report.rows) : to_csv(report.rows),
                       cfg.output);
    return 0;
}

int run_oracle(const std::string& config_path, const std::vector<std::string>& overrides,
               std::size_t s, const std::string& out_path) {
    ExperimentConfig cfg = load_with_overrides(config_path, overrides);
    if (s == 0)
        s = cfg.s_list.front();
    const OracleReport report = cmd_oracle(cfg, s);
    std::printf("best-%zu-term residual: %.12g (|I| = %zu)\n", report.s, report.residual,
                report.indices.size());
    const std::string path = !out_path.empty() ? out_path : cfg.output;
    if (!path.empty())
        write_or_print(oracle_to_json(report), path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimension-incremental detection of sparse basis supports"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "config file (flat text or .json)")->required();
        cmd->add_option("--set", overrides, "override a config key (key=value), repeatable");
    };

    auto* approximate =
        app.add_subcommand("approximate", "sparsity sweep with seeded repetitions and aggregates");
    add_common(approximate);

    auto* recover = app.add_subcommand("recover-sparse", "exact-recovery rate on sparse-random draws");
    add_common(recover);

    std::size_t oracle_s = 0;
    std::string oracle_out;
    auto* oracle = app.add_subcommand("oracle", "best-s-term benchmark for the configured function");
    add_common(oracle);
    oracle->add_option("-s,--sparsity", oracle_s, "s (default: first sweep value)");
    oracle->add_option("-o,--output", oracle_out, "write the oracle set as JSON");

    auto* theory = app.add_subcommand("theory", "evaluate the detection-guarantee bounds");
    theory->require_subcommand(1);

    double th_B = 1.0, th_C = 1.0, th_delta = 1.0, th_tail = 0.0, th_eps = 0.1;
    std::uint64_t th_size = 1;
    int th_d = 1, th_r = 1;
    double th_dpsi = 0.0, th_dplus = 1e-12, th_CQ = 1.0;
    std::vector<double> th_slice;

    auto* iters = theory->add_subcommand("iterations", "detection-iterations lower bound");
    iters->add_option("--B", th_B, "basis bound B")->required();
    iters->add_option("--C", th_C, "cubature weight-sum bound C")->required();
    iters->add_option("--size", th_size, "|I_3delta|")->required();
    iters->add_option("--delta", th_delta, "coefficient threshold delta")->required();
    iters->add_option("--tail", th_tail, "sum of |c_h| outside I_3delta")->required();
    iters->add_option("--d", th_d, "dimension")->required();
    iters->add_option("--eps", th_eps, "target failure probability")->required();

    auto* qcmd = theory->add_subcommand("q", "per-candidate small-value bound q and |I| q^r");
    qcmd->add_option("--B", th_B, "basis bound B")->required();
    qcmd->add_option("--c", th_slice, "coefficient slice magnitudes")->required();
    qcmd->add_option("--dpsi", th_dpsi, "delta_Psi");
    qcmd->add_option("--dplus", th_dplus, "delta_+");
    qcmd->add_option("--CQ", th_CQ, "C_Q");
    qcmd->add_option("--tail", th_tail, "sum of |c_h| outside I_delta");
    qcmd->add_option("--size", th_size, "|I_delta| for the union bound");
    qcmd->add_option("--r", th_r, "detection iterations for the union bound");

    auto* fp = theory->add_subcommand("false-positive", "accidental-detection bound");
    fp->add_option("--dpsi", th_dpsi, "delta_Psi")->required();
    fp->add_option("--dplus", th_dplus, "delta_+")->required();
    fp->add_option("--r", th_r, "detection iterations")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (approximate->parsed())
            return run_approximate(config_path, overrides);
        if (recover->parsed())
            return run_recover(config_path, overrides);
        if (oracle->parsed())
            return run_oracle(config_path, overrides, oracle_s, oracle_out);
        if (theory->parsed()) {
            if (iters->parsed()) {
                std::printf("r >= %lld\n",
                            static_cast<long long>(detection_iterations_bound(
                                th_B, th_C, th_size, th_delta, th_tail, th_d, th_eps)));
            } else if (qcmd->parsed()) {
                const double q = q_value(th_B, th_slice, th_dpsi, th_dplus, th_CQ, th_tail);
                std::printf("q = %.12g\n", q);
                std::printf("|I_delta| q^r <= %.12g\n", detection_failure_bound(q, th_size, th_r));
            } else if (fp->parsed()) {
                std::printf("false-positive chance <= %.12g\n",
                            false_positive_bound(th_dpsi, th_dplus, th_r));
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConstructionFailure& e) {
        std::cerr << "construction failure: " << e.what() << "\n";
        return 3;
    } catch (const EnumerationLimitError& e) {
        std::cerr << "enumeration limit: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
