#include "dimincr/detection.hpp"
#include "dimincr/metrics.hpp"
#include "dimincr/test_functions.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

using namespace dimincr;
using std::complex;

namespace {

AlgorithmParams sparse_params(std::size_t s, std::uint64_t seed) {
    AlgorithmParams p;
    p.s = s;
    p.s_local = static_cast<std::size_t>(std::ceil(1.2 * static_cast<double>(s)));
    p.r = 5;
    p.delta_plus = 1e-12;
    p.method = "r1l";
    p.seed = seed;
    return p;
}

} // namespace

TEST_SUITE_BEGIN("dimincr");

TEST_CASE("threshold selection keeps the largest magnitudes above the cutoff") {
    IndexSet K(DimSubset({1}), {MultiIndex({0}), MultiIndex({1}), MultiIndex({2}), MultiIndex({3}),
                                MultiIndex({4})});
    std::vector<complex<double>> values = {0.5, 0.9, 0.4, 0.7, 1e-15};
    IndexSet picked = threshold_select(K, values, 3, 1e-12);
    CHECK(picked.size() == 3);
    CHECK(picked.contains(MultiIndex({0})));
    CHECK(picked.contains(MultiIndex({1})));
    CHECK(picked.contains(MultiIndex({3})));

    // everything below the threshold: empty result is fine
    std::vector<complex<double>> tiny(5, complex<double>(1e-14, 0.0));
    CHECK(threshold_select(K, tiny, 3, 1e-12).empty());

    // exact tie at the cut: lexicographically smaller index wins
    std::vector<complex<double>> tied = {0.5, 0.9, 0.5, 0.2, 0.1};
    IndexSet tie_pick = threshold_select(K, tied, 2, 1e-12);
    CHECK(tie_pick.contains(MultiIndex({0})));
    CHECK(tie_pick.contains(MultiIndex({1})));
    CHECK(!tie_pick.contains(MultiIndex({2})));
}

TEST_CASE("single component step on a planted basis function") {
    const int d = 5;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(4), Rat(1), {}, true);
    CoefficientList terms;
    terms.terms.emplace_back(MultiIndex({2, 0, -3, 1, 0}), complex<double>(1.0, 0.0));
    auto f = from_coefficients(basis, terms);

    auto params = sparse_params(5, 1);
    for (int t = 1; t <= d; ++t) {
        Rng rng(derive_seed(7, {static_cast<std::uint64_t>(t)}));
        StepStats stats;
        IndexSet detected = single_component_step(f.box, basis, space, t, params, rng, &stats);
        // |Phi| = 1 for Fourier anchors, so the projection is detected surely
        const Entry expect = terms.terms[0].first[static_cast<std::size_t>(t - 1)];
        CHECK(detected.size() == 1);
        CHECK(detected.contains(MultiIndex({expect})));
        CHECK(stats.candidates == 9);
        CHECK(stats.samples > 0);
    }
}

TEST_CASE("single component step on the zero function") {
    const int d = 3;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(3), Rat(1), {}, true);
    BlackBox zero(d, [](std::span<const double>, std::size_t n, std::span<complex<double>> out) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 0.0;
    });
    auto params = sparse_params(4, 2);
    Rng rng(5);
    CHECK(single_component_step(zero, basis, space, 2, params, rng).empty());
}

TEST_CASE("single component step covers the support projection on random functions") {
    const int d = 6;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(4), Rat(1), {}, true);
    int hits = 0;
    for (std::uint64_t seedval = 0; seedval < 10; ++seedval) {
        Rng gen(derive_seed(1000, {seedval}));
        auto f = sparse_random_function(basis, space, 20, 0.5, 2.0, gen);
        AlgorithmParams params = sparse_params(20, seedval);
        params.s_local = 25;
        Rng rng(derive_seed(2000, {seedval}));
        IndexSet detected = single_component_step(f.box, basis, space, 3, params, rng);
        IndexSet truth = project(*f.support, DimSubset({3}));
        bool covered = true;
        for (const auto& k : truth)
            if (!detected.contains(k)) covered = false;
        hits += covered ? 1 : 0;
    }
    CHECK(hits >= 9);
}

TEST_CASE("coupled step keeps candidates above the threshold and caps the final size") {
    const int d = 3;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(3), Rat(1), {}, true);
    Rng gen(99);
    auto f = sparse_random_function(basis, space, 8, 1.0, 4.0, gen);
    auto params = sparse_params(8, 3);

    IndexSet left = project(*f.support, DimSubset({1}));
    IndexSet right = project(*f.support, DimSubset({2}));
    Rng rng(4);
    StepStats stats;
    IndexSet merged = coupled_step(f.box, basis, space, left, right, params, rng, &stats);
    IndexSet truth = project(*f.support, DimSubset({1, 2}));
    for (const auto& k : truth)
        CHECK(merged.contains(k));
    CHECK(stats.candidates <= left.size() * right.size());

    // final merge (u covers all dimensions) caps at s and returns coefficients
    params.s = 3;
    params.s_local = 6;
    IndexSet left12 = truth;
    IndexSet right3 = project(*f.support, DimSubset({3}));
    Rng rng2(5);
    std::vector<complex<double>> values;
    IndexSet final_set =
        coupled_step(f.box, basis, space, left12, right3, params, rng2, nullptr, &values);
    CHECK(final_set.size() <= 3);
    CHECK(values.size() == final_set.size());
    for (const auto& v : values)
        CHECK(std::abs(v) >= params.delta_plus);

    // empty inputs propagate an empty detection, not an error
    IndexSet empty_left(DimSubset({1}), {});
    CHECK(coupled_step(f.box, basis, space, empty_left, right, params, rng).empty());
}

TEST_CASE("coupled step keeps exactly the candidates with surviving coefficients") {
    // 12 candidates from {0,2,3} x {0,1,3,4}; the planted support projects
    // onto exactly 6 of them, and with an exact rule the other 6 evaluate to
    // zero and fall below the threshold
    const int d = 3;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(4));
    CoefficientList terms;
    const std::vector<MultiIndex> support = {
        MultiIndex({0, 0, 1}), MultiIndex({2, 0, 0}), MultiIndex({2, 1, 2}),
        MultiIndex({2, 3, 0}), MultiIndex({3, 3, 1}), MultiIndex({0, 4, 0})};
    for (const auto& k : support)
        terms.terms.emplace_back(k, complex<double>(1.0, 0.0));
    auto f = from_coefficients(basis, terms);

    IndexSet left(DimSubset({1}), {MultiIndex({0}), MultiIndex({2}), MultiIndex({3})});
    IndexSet right(DimSubset({2}),
                   {MultiIndex({0}), MultiIndex({1}), MultiIndex({3}), MultiIndex({4})});
    CHECK(candidate_set(left, right, space).size() == 12);

    auto params = sparse_params(10, 5);
    Rng rng(21);
    StepStats stats;
    IndexSet merged = coupled_step(f.box, basis, space, left, right, params, rng, &stats);
    CHECK(stats.candidates == 12);
    CHECK(merged == project(IndexSet(DimSubset::range(1, d), support), DimSubset({1, 2})));
    CHECK(merged.size() == 6);
}

TEST_CASE("randomized dyadic tie-breaking still recovers the support") {
    const int d = 5;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(3), Rat(1), {}, true);
    Rng gen(246);
    auto f = sparse_random_function(basis, space, 6, 1.0, 5.0, gen);
    auto params = sparse_params(6, 13);
    params.strategy = Strategy::Dyadic;
    params.randomized_ties = true;
    CHECK(run(f.box, basis, space, params).I == *f.support);
}

TEST_CASE("one-by-one schedule") {
    auto schedule = increment_schedule(Strategy::OneByOne, 4);
    REQUIRE(schedule.size() == 3);
    CHECK(schedule[0].left == DimSubset({1}));
    CHECK(schedule[0].right == DimSubset({2}));
    CHECK(schedule[1].left == DimSubset({1, 2}));
    CHECK(schedule[1].right == DimSubset({3}));
    CHECK(schedule[2].left == DimSubset({1, 2, 3}));
    CHECK(schedule[2].right == DimSubset({4}));
}

TEST_CASE("dyadic schedule for d = 9 produces the documented step dimensionalities") {
    auto schedule = increment_schedule(Strategy::Dyadic, 9);
    REQUIRE(schedule.size() == 8);
    // four 2-dimensional steps, then one 3-, 4-, 5- and 9-dimensional step
    std::map<std::size_t, int> by_result_dim;
    for (const auto& step : schedule)
        by_result_dim[step.left.size() + step.right.size()] += 1;
    CHECK(by_result_dim[2] == 4);
    CHECK(by_result_dim[3] == 1);
    CHECK(by_result_dim[4] == 1);
    CHECK(by_result_dim[5] == 1);
    CHECK(by_result_dim[9] == 1);
    // the odd one out in stage 1 is the highest label {9}
    for (const auto& step : schedule)
        if (step.stage == 1) {
            CHECK(step.left != DimSubset({9}));
            CHECK(step.right != DimSubset({9}));
        }
}

TEST_CASE("data-driven schedules start from the largest set") {
    std::vector<std::size_t> sizes = {2, 3, 1, 4, 9}; // set 5 is the largest
    auto schedule = increment_schedule(Strategy::DataDrivenOneByOne, 5, &sizes);
    REQUIRE(schedule.size() == 4);
    CHECK(schedule[0].left == DimSubset({5}));
    CHECK(schedule[0].right == DimSubset({4}));

    // dd-dyadic: largest paired with smallest, median kept when odd
    auto dyadic = increment_schedule(Strategy::DataDrivenDyadic, 5, &sizes);
    CHECK(dyadic[0].left == DimSubset({5}));  // size 9
    CHECK(dyadic[0].right == DimSubset({3})); // size 1
    CHECK(dyadic[1].left == DimSubset({4}));  // size 4
    CHECK(dyadic[1].right == DimSubset({1})); // size 2
    // median (set 2, size 3) is kept in stage 1
    for (const auto& step : dyadic)
        if (step.stage == 1) {
            CHECK(step.left != DimSubset({2}));
            CHECK(step.right != DimSubset({2}));
        }

    CHECK_THROWS_AS(increment_schedule(Strategy::DataDrivenDyadic, 5), std::invalid_argument);
}

TEST_CASE("full run recovers an exactly sparse function") {
    const int d = 6;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::symmetric_hyperbolic_cross(d, Rat(3), Rat(1), {}, true);
    Rng gen(12345);
    auto f = sparse_random_function(basis, space, 10, 1.0, 10.0, gen);

    auto params = sparse_params(10, 77);
    auto result = run(f.box, basis, space, params);
    CHECK(result.I == *f.support);
    double linf = 0.0;
    for (std::size_t i = 0; i < result.I.size(); ++i)
        linf = std::max(linf, std::abs(result.coefficients[i] - f.coefficient(result.I[i])));
    CHECK(linf <= 1e-8);
    CHECK(result.I.size() <= params.s);
    for (const auto& c : result.coefficients)
        CHECK(std::abs(c) >= params.delta_plus);
}

TEST_CASE("run on the zero function returns an empty detection") {
    const int d = 4;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(2), Rat(1), {}, true);
    BlackBox zero(d, [](std::span<const double>, std::size_t n, std::span<complex<double>> out) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 0.0;
    });
    auto result = run(zero, basis, space, sparse_params(5, 9));
    CHECK(result.I.empty());
    CHECK(result.coefficients.empty());
}

TEST_CASE("all four strategies agree on a sparse instance") {
    const int d = 5;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::symmetric_hyperbolic_cross(d, Rat(3), Rat(1), {}, true);
    Rng gen(5150);
    auto f = sparse_random_function(basis, space, 8, 1.0, 10.0, gen);

    std::vector<IndexSet> supports;
    for (Strategy strategy : {Strategy::OneByOne, Strategy::Dyadic, Strategy::DataDrivenOneByOne,
                              Strategy::DataDrivenDyadic}) {
        auto params = sparse_params(8, 31);
        params.strategy = strategy;
        supports.push_back(run(f.box, basis, space, params).I);
    }
    CHECK(supports[0] == *f.support);
    for (std::size_t i = 1; i < supports.size(); ++i)
        CHECK(supports[i] == supports[0]);
}

TEST_CASE("determinism: identical seed gives identical results and stats") {
    const int d = 4;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(3), Rat(1), {}, true);
    Rng gen(888);
    auto f = sparse_random_function(basis, space, 6, 0.5, 5.0, gen);

    auto params = sparse_params(6, 4242);
    auto r1 = run(f.box, basis, space, params);
    auto r2 = run(f.box, basis, space, params);
    CHECK(r1.I == r2.I);
    CHECK(r1.coefficients == r2.coefficients);
    CHECK(r1.total_samples == r2.total_samples);
    REQUIRE(r1.steps.size() == r2.steps.size());
    for (std::size_t i = 0; i < r1.steps.size(); ++i) {
        CHECK(r1.steps[i].u == r2.steps[i].u);
        CHECK(r1.steps[i].candidates == r2.steps[i].candidates);
        CHECK(r1.steps[i].M == r2.steps[i].M);
        CHECK(r1.steps[i].samples == r2.steps[i].samples);
    }
}

TEST_CASE("containment chain: projections of the final set were detected en route") {
    const int d = 5;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(3), Rat(1), {}, true);
    Rng gen(31337);
    auto f = sparse_random_function(basis, space, 7, 1.0, 8.0, gen);
    auto params = sparse_params(7, 11);
    auto result = run(f.box, basis, space, params);
    for (const auto& step : result.steps) {
        IndexSet projected = project(result.I, step.u);
        for (const auto& k : projected)
            CHECK(step.detected_set.contains(k));
    }
}

TEST_CASE("recompute_final refreshes coefficients on the detected set") {
    const int d = 4;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    auto space = SearchSpace::full_grid(d, Rat(3), Rat(1), {}, true);
    Rng gen(2718);
    auto f = sparse_random_function(basis, space, 5, 1.0, 4.0, gen);
    auto params = sparse_params(5, 6);
    params.recompute_final = true;
    auto result = run(f.box, basis, space, params);
    CHECK(result.I == *f.support);
    for (std::size_t i = 0; i < result.I.size(); ++i)
        CHECK(std::abs(result.coefficients[i] - f.coefficient(result.I[i])) < 1e-10);
    // the recompute pass shows up in the step log
    CHECK(result.steps.back().candidates == result.I.size());
}

TEST_CASE("method registry exposes the shipped methods and rejects unknown ones") {
    CHECK(get_method("r1l").required_basis == "fourier");
    CHECK(get_method("mc").required_basis == "fourier");
    CHECK(get_method("cmc").required_basis == "chebyshev");
    CHECK_THROWS(get_method("mr1l")); // extension slot, not shipped

    AlgorithmParams params;
    params.s_local = 5;
    params.method = "nope";
    CHECK_THROWS(params.validate());
}

TEST_SUITE_END();
