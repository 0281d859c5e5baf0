#include "dimincr/detection.hpp"

#include "dimincr/errors.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace dimincr {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::OneByOne: return "one-by-one";
        case Strategy::Dyadic: return "dyadic";
        case Strategy::DataDrivenOneByOne: return "dd-one-by-one";
        case Strategy::DataDrivenDyadic: return "dd-dyadic";
    }
    return "?";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "one-by-one") return Strategy::OneByOne;
    if (name == "dyadic") return Strategy::Dyadic;
    if (name == "dd-one-by-one" || name == "data-driven-one-by-one")
        return Strategy::DataDrivenOneByOne;
    if (name == "dd-dyadic" || name == "data-driven-dyadic") return Strategy::DataDrivenDyadic;
    throw ConfigError("unknown strategy '" + name + "'");
}

// ---------------------------------------------------------------------------
// method registry

namespace {

CubatureRule build_least_squares_pair_rule(const IndexSet& K, const DimSubset& u,
                                           const ProductBasis& basis, Rng& rng) {
    // degenerate |K| = 1 candidate set: two nodes are enough for the solve
    CubatureRule rule;
    rule.u = u;
    rule.K = K;
    rule.M = 2;
    rule.backend = CubatureBackend::LeastSquares;
    rule.nodes.resize(2 * u.size());
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t c = 0; c < u.size(); ++c)
            rule.nodes[j * u.size() + c] =
                basis.factors[static_cast<std::size_t>(u[c] - 1)].sample(rng);
    rule.weights.assign(2, 0.5);
    rule.weight_sum = 1.0;
    return rule;
}

std::map<std::string, ReconstructionMethod>& method_registry() {
    static std::map<std::string, ReconstructionMethod> reg = [] {
        std::map<std::string, ReconstructionMethod> m;
        m["r1l"] = ReconstructionMethod{
            "r1l", "fourier",
            [](const IndexSet& K, const DimSubset& u, const ProductBasis&, Rng&,
               const LatticeOptions& opts) {
                return lattice_rule(build_rank1_lattice(K, opts), K, u);
            }};
        auto mc_build = [](const IndexSet& K, const DimSubset& u, const ProductBasis& basis,
                           Rng& rng, const LatticeOptions&) {
            if (K.size() < 2)
                return build_least_squares_pair_rule(K, u, basis, rng);
            return build_mc_rule(K, u, basis, rng);
        };
        m["mc"] = ReconstructionMethod{"mc", "fourier", mc_build};
        m["cmc"] = ReconstructionMethod{"cmc", "chebyshev", mc_build};
        return m;
    }();
    return reg;
}

std::mutex method_mutex;

} // namespace

void register_method(ReconstructionMethod method) {
    std::lock_guard<std::mutex> lock(method_mutex);
    method_registry()[method.name] = std::move(method);
}

const ReconstructionMethod& get_method(const std::string& name) {
    std::lock_guard<std::mutex> lock(method_mutex);
    auto it = method_registry().find(name);
    if (it == method_registry().end())
        throw ConfigError("unknown reconstruction method '" + name + "'");
    return it->second;
}

void AlgorithmParams::validate() const {
    if (s < 1) throw ConfigError("params: s must be >= 1");
    if (s > s_local) throw ConfigError("params: requires s <= s_local");
    if (r < 1) throw ConfigError("params: r must be >= 1");
    if (!(delta_plus > 0.0)) throw ConfigError("params: delta_plus must be positive");
    get_method(method);
}

std::complex<double> DetectionResult::coefficient(const MultiIndex& k) const {
    auto it = std::lower_bound(I.begin(), I.end(), k);
    if (it == I.end() || *it != k)
        throw std::out_of_range("DetectionResult::coefficient: index not detected");
    return coefficients[static_cast<std::size_t>(it - I.begin())];
}

// ---------------------------------------------------------------------------
// selection

std::pair<IndexSet, std::vector<std::complex<double>>> threshold_select_with_values(
    const IndexSet& K, std::span<const std::complex<double>> values, std::size_t cap,
    double delta_plus) {
    if (values.size() != K.size())
        throw std::invalid_argument("threshold_select: values not aligned with K");
    std::vector<std::size_t> order;
    order.reserve(K.size());
    for (std::size_t i = 0; i < K.size(); ++i)
        if (std::abs(values[i]) >= delta_plus)
            order.push_back(i);
    // magnitude descending, lexicographically smaller index wins ties; K is
    // sorted, so position order is lexicographic order
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(values[a]), mb = std::abs(values[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    if (order.size() > cap)
        order.resize(cap);
    std::sort(order.begin(), order.end());
    std::vector<MultiIndex> members;
    std::vector<std::complex<double>> selected;
    members.reserve(order.size());
    selected.reserve(order.size());
    for (std::size_t i : order) {
        members.push_back(K[i]);
        selected.push_back(values[i]);
    }
    return {IndexSet(K.dims(), std::move(members)), std::move(selected)};
}

IndexSet threshold_select(const IndexSet& K, std::span<const std::complex<double>> values,
                          std::size_t cap, double delta_plus) {
    return threshold_select_with_values(K, values, cap, delta_plus).first;
}

// ---------------------------------------------------------------------------
// detection steps

IndexSet single_component_step(const BlackBox& f, const ProductBasis& basis,
                               const SearchSpace& space, int t, const AlgorithmParams& params,
                               Rng& rng, StepStats* stats) {
    const auto start = Clock::now();
    const DimSubset u = DimSubset::single(t);
    const DimSubset uc = u.complement(space.dimension());

    auto projection = project(space, u).enumerate(params.enumeration_limit);
    if (!projection)
        throw EnumerationLimitError("single_component_step: P_t(Gamma) not enumerable");
    const IndexSet& K = *projection;
    if (K.empty()) return IndexSet(u, {});

    const auto& method = get_method(params.method);
    const CubatureRule rule = method.build(K, u, basis, rng, params.lattice);
    const CoefficientEvaluator evaluator(rule, basis, f);

    IndexSet detected(u, {});
    std::uint64_t samples = 0;
    for (int i = 0; i < params.r; ++i) {
        const Anchor anchor = draw_anchor(basis, uc, rng);
        const ProjectedCoefficients coeffs = evaluator.evaluate(anchor);
        samples += coeffs.samples;
        detected = IndexSet::union_of(
            detected, threshold_select(K, coeffs.values, params.s_local, params.delta_plus));
    }
    if (stats) {
        stats->u = u;
        stats->candidates = K.size();
        stats->M = rule.M;
        stats->samples = samples;
        stats->seconds = elapsed_seconds(start);
        stats->detected = detected.size();
        stats->detected_set = detected;
    }
    return detected;
}

IndexSet coupled_step(const BlackBox& f, const ProductBasis& basis, const SearchSpace& space,
                      const IndexSet& left, const IndexSet& right, const AlgorithmParams& params,
                      Rng& rng, StepStats* stats, std::vector<std::complex<double>>* final_values) {
    const auto start = Clock::now();
    const DimSubset w = DimSubset::union_of(left.dims(), right.dims());
    const bool final_step = w.size() == static_cast<std::size_t>(space.dimension());
    if (stats) {
        *stats = StepStats{};
        stats->u = w;
    }
    if (final_values) final_values->clear();
    if (left.empty() || right.empty())
        return IndexSet(w, {}); // nothing to extend; propagates an empty detection

    const IndexSet K = candidate_set(left, right, space);
    if (stats) stats->candidates = K.size();
    if (K.empty()) {
        if (stats) stats->seconds = elapsed_seconds(start);
        return IndexSet(w, {});
    }

    const int iterations = final_step ? 1 : params.r;
    const std::size_t cap = final_step ? params.s : params.s_local;
    const DimSubset wc = w.complement(space.dimension());

    const auto& method = get_method(params.method);
    const CubatureRule rule = method.build(K, w, basis, rng, params.lattice);
    const CoefficientEvaluator evaluator(rule, basis, f);

    IndexSet detected(w, {});
    std::uint64_t samples = 0;
    for (int i = 0; i < iterations; ++i) {
        const Anchor anchor = draw_anchor(basis, wc, rng);
        const ProjectedCoefficients coeffs = evaluator.evaluate(anchor);
        samples += coeffs.samples;
        auto [selected, values] =
            threshold_select_with_values(K, coeffs.values, cap, params.delta_plus);
        if (final_step && final_values)
            *final_values = std::move(values);
        detected = IndexSet::union_of(detected, selected);
    }
    if (stats) {
        stats->M = rule.M;
        stats->samples = samples;
        stats->seconds = elapsed_seconds(start);
        stats->detected = detected.size();
        stats->detected_set = detected;
    }
    return detected;
}

// ---------------------------------------------------------------------------
// increment strategies

namespace {

struct PoolEntry {
    DimSubset dims;
    std::size_t size = 0;
    int leading() const { return dims.empty() ? 0 : dims[0]; }
};

std::vector<std::size_t> sort_for_dyadic(const std::vector<PoolEntry>& pool, bool randomized,
                                         Rng* rng) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pool[a].dims.size() != pool[b].dims.size())
            return pool[a].dims.size() < pool[b].dims.size();
        return pool[a].leading() < pool[b].leading();
    });
    if (randomized && rng) {
        // the paper picks randomly among equal dimensionalities
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i + 1;
            while (j < order.size() &&
                   pool[order[j]].dims.size() == pool[order[i]].dims.size())
                ++j;
            for (std::size_t k = j - 1; k > i; --k)
                std::swap(order[k], order[i + rng->below(k - i + 1)]);
            i = j;
        }
    }
    return order;
}

std::vector<std::size_t> sort_by_size_desc(const std::vector<PoolEntry>& pool) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pool[a].size != pool[b].size) return pool[a].size > pool[b].size;
        return pool[a].leading() < pool[b].leading();
    });
    return order;
}

// pairs of pool positions merged in this stage; unpaired entries are carried
std::vector<std::pair<std::size_t, std::size_t>> plan_stage(Strategy strategy,
                                                            const std::vector<PoolEntry>& pool,
                                                            bool randomized, Rng* rng) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    switch (strategy) {
        case Strategy::OneByOne: {
            // two sets with the smallest leading dimension labels
            std::vector<std::size_t> order(pool.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return pool[a].leading() < pool[b].leading();
            });
            pairs.emplace_back(order[0], order[1]);
            break;
        }
        case Strategy::DataDrivenOneByOne: {
            // handled by the caller through a precomputed order
            throw std::logic_error("plan_stage: dd-one-by-one uses a fixed order");
        }
        case Strategy::Dyadic: {
            auto order = sort_for_dyadic(pool, randomized, rng);
            const std::size_t usable = order.size() - (order.size() % 2); // odd: highest kept
            for (std::size_t i = 0; i + 1 < usable; i += 2)
                pairs.emplace_back(order[i], order[i + 1]);
            break;
        }
        case Strategy::DataDrivenDyadic: {
            auto order = sort_by_size_desc(pool);
            if (order.size() % 2 == 1)
                order.erase(order.begin() + static_cast<std::ptrdiff_t>((order.size() - 1) / 2));
            std::size_t lo = 0, hi = order.size();
            while (lo + 1 < hi) {
                pairs.emplace_back(order[lo], order[hi - 1]); // largest with smallest
                ++lo;
                --hi;
            }
            break;
        }
    }
    return pairs;
}

} // namespace

std::vector<MergeStep> increment_schedule(Strategy strategy, int d,
                                          const std::vector<std::size_t>* size_hints) {
    if (d < 2)
        throw std::invalid_argument("increment_schedule: requires d >= 2");
    const bool data_driven =
        strategy == Strategy::DataDrivenOneByOne || strategy == Strategy::DataDrivenDyadic;
    if (data_driven && (!size_hints || size_hints->size() != static_cast<std::size_t>(d)))
        throw std::invalid_argument("increment_schedule: data-driven strategies need size hints");

    std::vector<PoolEntry> pool;
    pool.reserve(static_cast<std::size_t>(d));
    for (int t = 1; t <= d; ++t)
        pool.push_back({DimSubset::single(t),
                        size_hints ? (*size_hints)[static_cast<std::size_t>(t - 1)] : 1});

    std::vector<MergeStep> schedule;
    int stage = 1;
    if (strategy == Strategy::OneByOne || strategy == Strategy::DataDrivenOneByOne) {
        std::vector<std::size_t> order;
        if (strategy == Strategy::OneByOne) {
            order.resize(pool.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
        } else {
            order = sort_by_size_desc(pool);
        }
        PoolEntry acc = pool[order[0]];
        for (std::size_t i = 1; i < order.size(); ++i, ++stage) {
            schedule.push_back({acc.dims, pool[order[i]].dims, stage});
            acc = {DimSubset::union_of(acc.dims, pool[order[i]].dims), acc.size * pool[order[i]].size};
        }
        return schedule;
    }

    while (pool.size() > 1) {
        auto pairs = plan_stage(strategy, pool, false, nullptr);
        std::vector<bool> used(pool.size(), false);
        std::vector<PoolEntry> next;
        for (auto [a, b] : pairs) {
            schedule.push_back({pool[a].dims, pool[b].dims, stage});
            // size prediction for later stages; a live run uses actual sizes
            next.push_back(
                {DimSubset::union_of(pool[a].dims, pool[b].dims), pool[a].size * pool[b].size});
            used[a] = used[b] = true;
        }
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!used[i]) next.push_back(pool[i]);
        pool = std::move(next);
        ++stage;
    }
    return schedule;
}

// ---------------------------------------------------------------------------
// full algorithm

namespace {

struct LivePoolEntry {
    DimSubset dims;
    IndexSet set;
};

DetectionResult run_one_dimensional(const BlackBox& f, const ProductBasis& basis,
                                    const SearchSpace& space, const AlgorithmParams& params) {
    // degenerate d = 1: the single detection already yields the coefficients
    const auto start = Clock::now();
    const DimSubset u = DimSubset::range(1, 1);
    auto projection = project(space, u).enumerate(params.enumeration_limit);
    if (!projection)
        throw EnumerationLimitError("run: P(Gamma) not enumerable");
    Rng rng(derive_seed(params.seed, {0x51, 1}));
    const auto& method = get_method(params.method);
    const CubatureRule rule = method.build(*projection, u, basis, rng, params.lattice);
    const CoefficientEvaluator evaluator(rule, basis, f);
    const ProjectedCoefficients coeffs = evaluator.evaluate(Anchor{DimSubset(), {}});
    auto [selected, values] =
        threshold_select_with_values(*projection, coeffs.values, params.s, params.delta_plus);
    DetectionResult result;
    result.I = selected;
    result.coefficients = values;
    result.steps.push_back({u, projection->size(), rule.M, coeffs.samples, elapsed_seconds(start),
                            selected.size(), selected});
    result.total_samples = coeffs.samples;
    result.seconds = elapsed_seconds(start);
    return result;
}

} // namespace

DetectionResult run(const BlackBox& f, const ProductBasis& basis, const SearchSpace& space,
                    const AlgorithmParams& params) {
    params.validate();
    const int d = space.dimension();
    if (basis.dimension() != d || f.dimension() != d)
        throw std::invalid_argument("run: dimension mismatch between space, basis and black box");
    const auto& method = get_method(params.method);
    if (!method.required_basis.empty())
        for (const auto& factor : basis.factors)
            if (factor.name != method.required_basis)
                throw ConfigError("method '" + method.name + "' requires " +
                                  method.required_basis + " factors");

    if (d == 1) return run_one_dimensional(f, basis, space, params);

    const auto start = Clock::now();
    DetectionResult result;

    // Step 1: one-dimensional detections
    std::vector<LivePoolEntry> pool;
    pool.reserve(static_cast<std::size_t>(d));
    for (int t = 1; t <= d; ++t) {
        Rng rng(derive_seed(params.seed, {0x51, static_cast<std::uint64_t>(t)}));
        StepStats stats;
        IndexSet detected = single_component_step(f, basis, space, t, params, rng, &stats);
        result.steps.push_back(stats);
        pool.push_back({DimSubset::single(t), std::move(detected)});
    }

    // Step 2: merge per increment strategy
    Rng tie_rng(derive_seed(params.seed, {0x71}));
    std::uint64_t merge_ordinal = 0;
    IndexSet final_set;
    std::vector<std::complex<double>> final_values;

    auto merge = [&](const LivePoolEntry& a, const LivePoolEntry& b) {
        Rng rng(derive_seed(params.seed, {0x52, merge_ordinal++}));
        StepStats stats;
        std::vector<std::complex<double>> values;
        IndexSet merged = coupled_step(f, basis, space, a.set, b.set, params, rng, &stats, &values);
        result.steps.push_back(stats);
        if (merged.dims().size() == static_cast<std::size_t>(d)) {
            final_set = merged;
            final_values = std::move(values);
        }
        return LivePoolEntry{merged.dims(), std::move(merged)};
    };

    if (params.strategy == Strategy::OneByOne || params.strategy == Strategy::DataDrivenOneByOne) {
        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (params.strategy == Strategy::DataDrivenOneByOne) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (pool[a].set.size() != pool[b].set.size())
                    return pool[a].set.size() > pool[b].set.size();
                return pool[a].dims[0] < pool[b].dims[0];
            });
        }
        LivePoolEntry acc = std::move(pool[order[0]]);
        for (std::size_t i = 1; i < order.size(); ++i)
            acc = merge(acc, pool[order[i]]);
    } else {
        while (pool.size() > 1) {
            std::vector<PoolEntry> view;
            view.reserve(pool.size());
            for (const auto& e : pool)
                view.push_back({e.dims, e.set.size()});
            auto pairs = plan_stage(params.strategy, view, params.randomized_ties, &tie_rng);
            std::vector<bool> used(pool.size(), false);
            std::vector<LivePoolEntry> next;
            for (auto [a, b] : pairs) {
                next.push_back(merge(pool[a], pool[b]));
                used[a] = used[b] = true;
            }
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (!used[i]) next.push_back(std::move(pool[i]));
            pool = std::move(next);
        }
    }

    result.I = final_set.dims().size() == static_cast<std::size_t>(d)
                   ? final_set
                   : IndexSet(DimSubset::range(1, d), {});
    result.coefficients = std::move(final_values);

    // optional fresh coefficient pass on the detected set
    if (params.recompute_final && !result.I.empty()) {
        const auto rstart = Clock::now();
        Rng rng(derive_seed(params.seed, {0x53}));
        const CubatureRule rule =
            method.build(result.I, DimSubset::range(1, d), basis, rng, params.lattice);
        const CoefficientEvaluator evaluator(rule, basis, f);
        const ProjectedCoefficients coeffs = evaluator.evaluate(Anchor{DimSubset(), {}});
        auto [selected, values] =
            threshold_select_with_values(result.I, coeffs.values, params.s, params.delta_plus);
        result.I = selected;
        result.coefficients = values;
        result.steps.push_back({DimSubset::range(1, d), rule.K.size(), rule.M, coeffs.samples,
                                elapsed_seconds(rstart), selected.size(), selected});
    }

    for (const auto& s : result.steps)
        result.total_samples += s.samples;
    result.seconds = elapsed_seconds(start);
    return result;
}

} // namespace dimincr
