#include "dimincr/experiment.hpp"

#include "dimincr/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dimincr {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_seconds(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double quantile(std::vector<double> values, double q) {
    // linear interpolation between order statistics (same convention used by
    // the self-audit below)
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

std::size_t outlier_count(const std::vector<double>& values) {
    // more than 1.5 interquartile ranges above the upper quartile
    const double q1 = quantile(values, 0.25);
    const double q3 = quantile(values, 0.75);
    const double fence = q3 + 1.5 * (q3 - q1);
    std::size_t n = 0;
    for (double v : values)
        if (v > fence) ++n;
    return n;
}

struct ColumnView {
    std::vector<double> samples, seconds, rel_l2, linf, l2, l1, success;
};

ColumnView columns_of(const std::vector<RunRecord>& rows) {
    ColumnView c;
    for (const auto& r : rows) {
        c.samples.push_back(static_cast<double>(r.samples));
        c.seconds.push_back(r.seconds);
        c.rel_l2.push_back(r.rel_l2);
        c.linf.push_back(r.linf);
        c.l2.push_back(r.l2);
        c.l1.push_back(r.l1);
        c.success.push_back(r.success);
    }
    return c;
}

std::vector<RunRecord> aggregate_rows(std::size_t s, const std::string& method,
                                      const std::string& strategy,
                                      const std::vector<RunRecord>& raw) {
    const ColumnView c = columns_of(raw);
    double success_rate = 0.0;
    for (double v : c.success)
        success_rate += v;
    success_rate /= static_cast<double>(raw.size());

    auto make = [&](const std::string& label) {
        RunRecord r;
        r.run = label;
        r.s = s;
        r.method = method;
        r.strategy = strategy;
        r.success = success_rate;
        return r;
    };
    RunRecord med = make("median"), q25 = make("q25"), q75 = make("q75"), out = make("outliers");
    med.samples = static_cast<std::uint64_t>(median(c.samples));
    med.seconds = median(c.seconds);
    med.rel_l2 = median(c.rel_l2);
    med.linf = median(c.linf);
    med.l2 = median(c.l2);
    med.l1 = median(c.l1);
    q25.samples = static_cast<std::uint64_t>(quantile(c.samples, 0.25));
    q25.seconds = quantile(c.seconds, 0.25);
    q25.rel_l2 = quantile(c.rel_l2, 0.25);
    q25.linf = quantile(c.linf, 0.25);
    q25.l2 = quantile(c.l2, 0.25);
    q25.l1 = quantile(c.l1, 0.25);
    q75.samples = static_cast<std::uint64_t>(quantile(c.samples, 0.75));
    q75.seconds = quantile(c.seconds, 0.75);
    q75.rel_l2 = quantile(c.rel_l2, 0.75);
    q75.linf = quantile(c.linf, 0.75);
    q75.l2 = quantile(c.l2, 0.75);
    q75.l1 = quantile(c.l1, 0.75);
    out.samples = outlier_count(c.samples);
    out.seconds = static_cast<double>(outlier_count(c.seconds));
    out.rel_l2 = static_cast<double>(outlier_count(c.rel_l2));
    out.linf = static_cast<double>(outlier_count(c.linf));
    out.l2 = static_cast<double>(outlier_count(c.l2));
    out.l1 = static_cast<double>(outlier_count(c.l1));
    return {med, q25, q75, out};
}

// the aggregates written out must be recomputable from the raw rows
void audit_aggregates(const std::vector<RunRecord>& raw, const std::vector<RunRecord>& agg) {
    const auto fresh = aggregate_rows(agg.front().s, agg.front().method, agg.front().strategy, raw);
    for (std::size_t i = 0; i < agg.size(); ++i) {
        const bool same = fresh[i].samples == agg[i].samples && fresh[i].seconds == agg[i].seconds &&
                          fresh[i].rel_l2 == agg[i].rel_l2 && fresh[i].linf == agg[i].linf &&
                          fresh[i].l2 == agg[i].l2 && fresh[i].l1 == agg[i].l1 &&
                          fresh[i].success == agg[i].success;
        if (!same)
            throw std::logic_error("aggregate self-audit failed for row '" + agg[i].run + "'");
    }
}

} // namespace

ProductBasis build_basis(const ExperimentConfig& cfg) {
    return ProductBasis::uniform(make_basis(cfg.basis), cfg.space->dimension());
}

KnownCoefficientFunction build_function(const ExperimentConfig& cfg, std::uint64_t run_seed) {
    const auto& fn = cfg.function;
    if (fn.name == "periodic10d")
        return periodic_test_function_10d();
    if (fn.name == "cheb-analytic") {
        std::vector<int> a = fn.dims_a, b = fn.dims_b;
        if (a.empty() && b.empty()) {
            for (int t = 1; t <= cfg.space->dimension(); ++t)
                (t % 2 == 1 ? a : b).push_back(t);
        }
        return chebyshev_test_function(cfg.space->dimension(), a, fn.a1, b, fn.a2);
    }
    if (fn.name == "sparse-random") {
        const std::uint64_t base = fn.seed != 0 ? fn.seed : cfg.seed;
        Rng rng(derive_seed(base, {0xF0, run_seed}));
        return sparse_random_function(build_basis(cfg), *cfg.space, fn.s_star, fn.cmin, fn.cmax, rng,
                                      cfg.enumeration_limit);
    }
    throw ConfigError("unknown function '" + fn.name + "'");
}

AlgorithmParams build_params(const ExperimentConfig& cfg, std::size_t s, std::uint64_t run_seed) {
    AlgorithmParams params;
    params.s = s;
    params.s_local = static_cast<std::size_t>(std::ceil(cfg.s_local_factor * static_cast<double>(s)));
    params.delta_plus = cfg.delta_plus;
    params.r = cfg.r;
    params.method = cfg.method;
    params.strategy = cfg.strategy;
    params.recompute_final = cfg.recompute_final;
    params.seed = run_seed;
    params.lattice.M_cap = cfg.lattice_M_cap;
    params.enumeration_limit = cfg.enumeration_limit;
    return params;
}

SweepResult cmd_approximate(const ExperimentConfig& cfg) {
    const ProductBasis basis = build_basis(cfg);
    SweepResult result;

    KnownCoefficientFunction fixed_function;
    const bool per_run_function = cfg.function.name == "sparse-random";
    if (!per_run_function)
        fixed_function = build_function(cfg, 0);

    bool any_success = false;
    std::string first_failure;
    for (std::size_t si = 0; si < cfg.s_list.size(); ++si) {
        const std::size_t s = cfg.s_list[si];
        std::vector<RunRecord> raw;
        raw.reserve(static_cast<std::size_t>(cfg.runs));
        for (int run = 0; run < cfg.runs; ++run) {
            const std::uint64_t run_seed =
                derive_seed(cfg.seed, {si, static_cast<std::uint64_t>(run)});
            RunRecord record;
            record.run = std::to_string(run);
            record.s = s;
            record.method = cfg.method;
            record.strategy = to_string(cfg.strategy);
            try {
                const KnownCoefficientFunction f =
                    per_run_function ? build_function(cfg, static_cast<std::uint64_t>(run))
                                     : fixed_function;
                const AlgorithmParams params = build_params(cfg, s, run_seed);
                const std::uint64_t before = f.box.evaluations();
                const DetectionResult detection = dimincr::run(f.box, basis, *cfg.space, params);
                const std::uint64_t consumed = f.box.evaluations() - before;
                if (consumed != detection.total_samples)
                    throw std::logic_error("sample accounting mismatch");
                const ErrorReport report = make_error_report(f, detection);
                record.samples = report.samples;
                record.seconds = cfg.record_timing ? report.seconds : 0.0;
                record.rel_l2 = report.rel_l2;
                record.linf = report.coeff_err_linf;
                record.l2 = report.coeff_err_l2;
                record.l1 = report.coeff_err_l1;
                record.success = 1.0;
                record.steps = detection.steps;
                if (!cfg.record_timing)
                    for (auto& step : record.steps)
                        step.seconds = 0.0;
                any_success = true;
            } catch (const ConstructionFailure& e) {
                record.success = 0.0; // sub-run failure recorded, sweep continues
                if (first_failure.empty()) first_failure = e.what();
            }
            raw.push_back(std::move(record));
        }
        const auto agg = aggregate_rows(s, cfg.method, to_string(cfg.strategy), raw);
        audit_aggregates(raw, agg);
        result.rows.insert(result.rows.end(), raw.begin(), raw.end());
        result.rows.insert(result.rows.end(), agg.begin(), agg.end());
    }
    if (!any_success && !first_failure.empty())
        throw ConstructionFailure("every run failed: " + first_failure);
    return result;
}

RecoverReport cmd_recover_sparse(const ExperimentConfig& cfg) {
    if (cfg.function.name != "sparse-random")
        throw ConfigError("recover-sparse requires function = sparse-random");
    const ProductBasis basis = build_basis(cfg);
    RecoverReport report;
    int total_success = 0, total_trials = 0;

    for (std::size_t si = 0; si < cfg.s_list.size(); ++si) {
        const std::size_t s = cfg.s_list[si];
        RecoverReport::PerSparsity per;
        per.s = s;
        for (int run = 0; run < cfg.runs; ++run) {
            const std::uint64_t run_seed =
                derive_seed(cfg.seed, {si, static_cast<std::uint64_t>(run)});
            const KnownCoefficientFunction f = build_function(cfg, static_cast<std::uint64_t>(run));
            const AlgorithmParams params = build_params(cfg, s, run_seed);

            RunRecord record;
            record.run = std::to_string(run);
            record.s = s;
            record.method = cfg.method;
            record.strategy = to_string(cfg.strategy);
            bool success = false;
            try {
                const DetectionResult detection = dimincr::run(f.box, basis, *cfg.space, params);
                const ErrorReport errors = make_error_report(f, detection);
                record.samples = errors.samples;
                record.seconds = cfg.record_timing ? errors.seconds : 0.0;
                record.rel_l2 = errors.rel_l2;
                record.linf = errors.coeff_err_linf;
                record.l2 = errors.coeff_err_l2;
                record.l1 = errors.coeff_err_l1;
                success = f.support && detection.I == *f.support &&
                          errors.coeff_err_linf <= cfg.recover_tol;
            } catch (const ConstructionFailure&) {
                success = false;
            }
            record.success = success ? 1.0 : 0.0;
            report.rows.push_back(std::move(record));
            per.successes += success ? 1 : 0;
            ++per.trials;
        }
        per.rate = static_cast<double>(per.successes) / static_cast<double>(per.trials);
        total_success += per.successes;
        total_trials += per.trials;
        report.rates.push_back(per);
    }
    report.overall_rate = static_cast<double>(total_success) / static_cast<double>(total_trials);
    return report;
}

OracleReport cmd_oracle(const ExperimentConfig& cfg, std::size_t s) {
    const KnownCoefficientFunction f = build_function(cfg, 0);
    auto [indices, residual] = best_s_term_oracle(f, *cfg.space, s, cfg.enumeration_limit);
    OracleReport report;
    report.s = s;
    report.residual = residual;
    report.indices = std::move(indices);
    return report;
}

std::string to_csv(const std::vector<RunRecord>& rows) {
    std::string out = "run,s,method,strategy,samples,seconds,rel_l2,linf,l2,l1,success\n";
    for (const auto& r : rows) {
        out += r.run;
        out += ',';
        out += std::to_string(r.s);
        out += ',';
        out += r.method;
        out += ',';
        out += r.strategy;
        out += ',';
        out += std::to_string(r.samples);
        out += ',';
        out += format_seconds(r.seconds);
        out += ',';
        out += format_double(r.rel_l2);
        out += ',';
        out += format_double(r.linf);
        out += ',';
        out += format_double(r.l2);
        out += ',';
        out += format_double(r.l1);
        out += ',';
        out += format_double(r.success);
        out += '\n';
    }
    return out;
}

std::string to_json_records(const std::vector<RunRecord>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row = {{"run", r.run},     {"s", r.s},
                              {"method", r.method}, {"strategy", r.strategy},
                              {"samples", r.samples}, {"seconds", r.seconds},
                              {"rel_l2", r.rel_l2}, {"linf", r.linf},
                              {"l2", r.l2},        {"l1", r.l1},
                              {"success", r.success}};
        if (!r.steps.empty()) {
            nlohmann::json steps = nlohmann::json::array();
            for (const auto& s : r.steps)
                steps.push_back({{"dims", s.u.to_string()},
                                 {"candidates", s.candidates},
                                 {"M", s.M},
                                 {"samples", s.samples},
                                 {"seconds", s.seconds},
                                 {"detected", s.detected}});
            row["steps"] = steps;
        }
        arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
}

std::string oracle_to_json(const OracleReport& report) {
    nlohmann::json j;
    j["s"] = report.s;
    j["residual"] = report.residual;
    nlohmann::json indices = nlohmann::json::array();
    for (const auto& k : report.indices) {
        nlohmann::json idx = nlohmann::json::array();
        for (Entry e : k)
            idx.push_back(e);
        indices.push_back(idx);
    }
    j["indices"] = indices;
    return j.dump(2) + "\n";
}

} // namespace dimincr
