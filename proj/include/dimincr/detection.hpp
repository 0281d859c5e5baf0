#pragma once

#include "dimincr/basis.hpp"
#include "dimincr/black_box.hpp"
#include "dimincr/cubature.hpp"
#include "dimincr/rng.hpp"
#include "dimincr/search_space.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dimincr {

enum class Strategy { OneByOne, Dyadic, DataDrivenOneByOne, DataDrivenDyadic };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

// Pluggable reconstruction method: builds the node/weight rule used to
// approximate projected coefficients on a candidate set. "mc", "r1l" and
// "cmc" are pre-registered; further methods (e.g. multiple-lattice variants)
// can be added through register_method.
struct ReconstructionMethod {
    std::string name;
    std::string required_basis; // factor name this method is valid for; empty = any
    std::function<CubatureRule(const IndexSet& K, const DimSubset& u, const ProductBasis&, Rng&,
                               const LatticeOptions&)>
        build;
};

void register_method(ReconstructionMethod method);
const ReconstructionMethod& get_method(const std::string& name);

struct AlgorithmParams {
    std::size_t s = 10;
    std::size_t s_local = 12; // s <= s_local
    double delta_plus = 1e-12;
    int r = 5;
    std::string method = "r1l";
    Strategy strategy = Strategy::OneByOne;
    bool recompute_final = false;
    std::uint64_t seed = 0;
    bool randomized_ties = false; // restore the randomized dyadic tie-breaking
    LatticeOptions lattice;
    std::size_t enumeration_limit = 10'000'000;

    void validate() const;
};

struct MergeStep {
    DimSubset left, right;
    int stage = 0;
};

struct StepStats {
    DimSubset u;            // dimensions covered after the step
    std::size_t candidates = 0;
    std::int64_t M = 0;
    std::uint64_t samples = 0;
    double seconds = 0.0;
    std::size_t detected = 0;
    IndexSet detected_set; // I_u after the step
};

struct DetectionResult {
    IndexSet I; // on {1,...,d}
    std::vector<std::complex<double>> coefficients; // aligned with I, all >= delta_plus
    std::vector<StepStats> steps;
    std::uint64_t total_samples = 0;
    double seconds = 0.0;

    std::complex<double> coefficient(const MultiIndex& k) const;
};

// indices of the up to `cap` largest magnitudes >= delta_plus; exact ties at
// the cut keep the lexicographically smaller index
IndexSet threshold_select(const IndexSet& K, std::span<const std::complex<double>> values,
                          std::size_t cap, double delta_plus);

// as above but also returns the selected values (used by the final step)
std::pair<IndexSet, std::vector<std::complex<double>>> threshold_select_with_values(
    const IndexSet& K, std::span<const std::complex<double>> values, std::size_t cap,
    double delta_plus);

// Step 1 for dimension t: rule on P_{t}(Gamma), r anchor draws, union of
// threshold selections.
IndexSet single_component_step(const BlackBox& f, const ProductBasis& basis,
                               const SearchSpace& space, int t, const AlgorithmParams& params,
                               Rng& rng, StepStats* stats = nullptr);

// Generalized Step 2: merge detected sets on disjoint subsets; the literal
// Algorithm reads left = {1,...,t-1}, right = {t}. When the union covers all
// dimensions, one iteration with cap s is used and the selected coefficient
// values are returned through `final_values`.
IndexSet coupled_step(const BlackBox& f, const ProductBasis& basis, const SearchSpace& space,
                      const IndexSet& left, const IndexSet& right, const AlgorithmParams& params,
                      Rng& rng, StepStats* stats = nullptr,
                      std::vector<std::complex<double>>* final_values = nullptr);

// Merge order preview for a given strategy. The data-driven variants need
// size hints for the d one-dimensional sets; later-stage sizes are predicted
// as products (a live run re-evaluates the actual sizes per stage).
std::vector<MergeStep> increment_schedule(Strategy strategy, int d,
                                          const std::vector<std::size_t>* size_hints = nullptr);

DetectionResult run(const BlackBox& f, const ProductBasis& basis, const SearchSpace& space,
                    const AlgorithmParams& params);

} // namespace dimincr
