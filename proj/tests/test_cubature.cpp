#include "dimincr/basis.hpp"
#include "dimincr/cubature.hpp"
#include "dimincr/errors.hpp"
#include "dimincr/multi_index.hpp"
#include "dimincr/rng.hpp"
#include "dimincr/test_functions.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace dimincr;
using std::complex;

namespace {

// oracle: the reconstruction property checked over all pairwise differences
bool differences_nonzero_mod(const IndexSet& K, const std::vector<Entry>& z, std::int64_t M) {
    for (std::size_t a = 0; a < K.size(); ++a)
        for (std::size_t b = 0; b < K.size(); ++b) {
            if (a == b) continue;
            std::int64_t dot = 0;
            for (std::size_t c = 0; c < z.size(); ++c)
                dot += (K[a][c] - K[b][c]) * z[c];
            if (((dot % M) + M) % M == 0) return false;
        }
    return true;
}

// oracle: honest weighted summation of the exactness condition for one pair
complex<double> pair_sum(const CubatureRule& rule, const ProductBasis& basis, const MultiIndex& k1,
                         const MultiIndex& k2) {
    complex<double> acc = 0.0;
    const std::size_t t = rule.u.size();
    for (std::int64_t j = 0; j < rule.M; ++j) {
        std::span<const double> xi(rule.nodes.data() + static_cast<std::size_t>(j) * t, t);
        acc += rule.weights[static_cast<std::size_t>(j)] * eval_product(basis, rule.u, k1, xi) *
               std::conj(eval_product(basis, rule.u, k2, xi));
    }
    return acc;
}

IndexSet random_candidate_set(Rng& rng, std::size_t t, std::size_t size, Entry extent) {
    std::vector<MultiIndex> members;
    while (members.size() < size) {
        std::vector<Entry> kv(t);
        for (auto& e : kv)
            e = static_cast<Entry>(rng.below(static_cast<std::uint64_t>(2 * extent + 1))) - extent;
        members.emplace_back(std::move(kv));
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }
    return IndexSet(DimSubset::range(1, static_cast<int>(t)), std::move(members));
}

} // namespace

TEST_SUITE_BEGIN("cubature");

TEST_CASE("one-dimensional lattice admissibility") {
    std::vector<MultiIndex> members;
    for (Entry k = 0; k <= 7; ++k)
        members.push_back(MultiIndex({k}));
    IndexSet K(DimSubset({1}), members);

    // (z=1, M=11) is admissible for {0..7}; so is any prime above 14
    CHECK(differences_nonzero_mod(K, {1}, 11));
    CHECK(reconstruction_property(Rank1Lattice{{1}, 11}, K));
    CHECK(differences_nonzero_mod(K, {1}, 17));
    CHECK(!differences_nonzero_mod(K, {1}, 7)); // 7 - 0 = 0 mod 7

    auto lattice = build_rank1_lattice(K);
    CHECK(reconstruction_property(lattice, K));
    CHECK(differences_nonzero_mod(K, lattice.z, lattice.M));
}

TEST_CASE("two-dimensional admissibility example") {
    IndexSet K(DimSubset({1, 2}),
               {MultiIndex({0, 0}), MultiIndex({1, 0}), MultiIndex({0, 1}), MultiIndex({1, 1})});
    // differences map to {1,2,3} mod 4 under z = (1,2)
    CHECK(differences_nonzero_mod(K, {1, 2}, 4));
    CHECK(reconstruction_property(Rank1Lattice{{1, 2}, 4}, K));

    auto lattice = build_rank1_lattice(K);
    CHECK(reconstruction_property(lattice, K));
    CHECK(differences_nonzero_mod(K, lattice.z, lattice.M));
}

TEST_CASE("singleton candidate set") {
    IndexSet K(DimSubset({1, 2}), {MultiIndex({3, -2})});
    auto lattice = build_rank1_lattice(K);
    CHECK(lattice.M == 1);

    // single node at the origin: fhat_k = f(0, anchor) conj(Phi_k(0))
    auto basis = ProductBasis::uniform(fourier_basis(), 2);
    auto rule = lattice_rule(lattice, K, DimSubset({1, 2}));
    CHECK(rule.M == 1);
    CHECK(rule.nodes[0] == 0.0);
    CHECK(rule.nodes[1] == 0.0);
    BlackBox f(2, [](std::span<const double>, std::size_t n, std::span<complex<double>> out) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = complex<double>(0.7, -0.2);
    });
    auto coeffs = projected_coefficients(rule, f, basis, Anchor{DimSubset(), {}});
    CHECK(std::abs(coeffs.values[0] - complex<double>(0.7, -0.2)) < 1e-15);
}

TEST_CASE("construction failure under a tiny cap") {
    Rng rng(3);
    IndexSet K = random_candidate_set(rng, 3, 50, 8);
    LatticeOptions opts;
    opts.M_cap = 50; // below 2|K|+1, nothing admissible
    CHECK_THROWS_AS(build_rank1_lattice(K, opts), ConstructionFailure);
}

TEST_CASE("lattice rule is exact on its candidate set") {
    auto basis = ProductBasis::uniform(fourier_basis(), 2);
    IndexSet K(DimSubset({1, 2}),
               {MultiIndex({0, 0}), MultiIndex({1, 0}), MultiIndex({0, 1}), MultiIndex({1, 1})});
    auto rule = lattice_rule(build_rank1_lattice(K), K, DimSubset({1, 2}));
    CHECK(rule.weight_sum == doctest::Approx(1.0)); // C_Q = 1 for equal weights
    for (const auto& k1 : K)
        for (const auto& k2 : K) {
            const auto s = pair_sum(rule, basis, k1, k2);
            const double expect = (k1 == k2) ? 1.0 : 0.0;
            CHECK(std::abs(s - expect) < 1e-12);
        }
    CHECK(exactness_check(rule, K, basis) <= 1e-12);
}

TEST_CASE("exactness check flags a degenerate lattice") {
    auto basis = ProductBasis::uniform(fourier_basis(), 1);
    std::vector<MultiIndex> members = {MultiIndex({0}), MultiIndex({1})};
    IndexSet K(DimSubset({1}), members);
    // z = 0 collapses all nodes onto the origin
    auto rule = lattice_rule(Rank1Lattice{{0}, 5}, K, DimSubset({1}));
    CHECK(exactness_check(rule, K, basis) >= 1.0 - 1e-12);

    // equal-weight rule with K = {0} integrates the constant exactly
    IndexSet K0(DimSubset({1}), {MultiIndex({0})});
    auto rule0 = lattice_rule(Rank1Lattice{{3}, 7}, K0, DimSubset({1}));
    CHECK(exactness_check(rule0, K0, basis) < 1e-15);
}

TEST_CASE("monte carlo rule sizes follow the oversampling formulas") {
    Rng rng(17);
    auto fourier = ProductBasis::uniform(fourier_basis(), 3);
    std::vector<MultiIndex> members;
    for (Entry k = 0; k < 100; ++k)
        members.push_back(MultiIndex({k, 0, k % 7}));
    IndexSet K(DimSubset::range(1, 3), members);
    auto rule = build_mc_rule(K, DimSubset::range(1, 3), fourier, rng);
    CHECK(rule.M == 461); // ceil(100 ln 100)
    CHECK(rule.backend == CubatureBackend::LeastSquares);

    auto cheb = ProductBasis::uniform(chebyshev_basis(), 2);
    IndexSet Kc(DimSubset({1, 2}), {MultiIndex({0, 0}), MultiIndex({1, 0}), MultiIndex({2, 1})});
    Rng rng2(17);
    auto crule = build_mc_rule(Kc, DimSubset({1, 2}), cheb, rng2);
    CHECK(crule.M == 14); // m = 1 + 2 + 4 = 7, ceil(7 ln 7)

    // reproducible node draws
    Rng ra(5), rb(5);
    auto r1 = build_mc_rule(Kc, DimSubset({1, 2}), cheb, ra);
    auto r2 = build_mc_rule(Kc, DimSubset({1, 2}), cheb, rb);
    CHECK(r1.nodes == r2.nodes);

    CHECK_THROWS_AS(build_mc_rule(IndexSet(DimSubset({1}), {MultiIndex({0})}), DimSubset({1}),
                                  fourier, rng),
                    std::invalid_argument);
}

TEST_CASE("projected coefficients pick out a planted basis function") {
    const int d = 4;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    const DimSubset u({1, 2});
    const MultiIndex h({2, -1, 3, 0});

    CoefficientList terms;
    terms.terms.emplace_back(h, complex<double>(1.0, 0.0));
    auto f = from_coefficients(basis, terms);

    std::vector<MultiIndex> members;
    for (Entry a = -2; a <= 2; ++a)
        for (Entry b = -2; b <= 2; ++b)
            members.push_back(MultiIndex({a, b}));
    IndexSet K(u, members);
    auto rule = lattice_rule(build_rank1_lattice(K), K, u);

    Rng rng(31);
    Anchor anchor = draw_anchor(basis, u.complement(d), rng);
    auto coeffs = projected_coefficients(rule, f.box, basis, anchor);

    const MultiIndex h_u({2, -1});
    const MultiIndex h_uc({3, 0});
    const auto expected = eval_product(basis, u.complement(d), h_uc, anchor.values);
    for (std::size_t i = 0; i < K.size(); ++i) {
        const auto target = (K[i] == h_u) ? expected : complex<double>(0.0);
        CHECK(std::abs(coeffs.values[i] - target) < 1e-10);
    }
}

TEST_CASE("constant function projects onto the zero index") {
    const int d = 3;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    const DimSubset u({1, 3});
    std::vector<MultiIndex> members;
    for (Entry a = -1; a <= 1; ++a)
        for (Entry b = -1; b <= 1; ++b)
            members.push_back(MultiIndex({a, b}));
    IndexSet K(u, members);
    auto rule = lattice_rule(build_rank1_lattice(K), K, u);
    BlackBox one(d, [](std::span<const double>, std::size_t n, std::span<complex<double>> out) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 1.0;
    });
    Rng rng(8);
    auto coeffs = projected_coefficients(rule, one, basis, draw_anchor(basis, u.complement(d), rng));
    for (std::size_t i = 0; i < K.size(); ++i) {
        const double expect = (K[i] == MultiIndex({0, 0})) ? 1.0 : 0.0;
        CHECK(std::abs(coeffs.values[i] - expect) < 1e-12);
    }
}

TEST_CASE("lattice-fft backend equals direct summation") {
    Rng rng(101);
    const int d = 3;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    const DimSubset u = DimSubset::range(1, d);
    for (int trial = 0; trial < 50; ++trial) {
        IndexSet K = random_candidate_set(rng, 3, 4 + rng.below(60), 10);
        // random sparse expansion supported on a subset of K (zero anchor part)
        CoefficientList terms;
        for (const auto& k : K)
            if (rng.uniform() < 0.3)
                terms.terms.emplace_back(k, std::polar(rng.uniform(0.1, 2.0),
                                                       2.0 * std::numbers::pi * rng.uniform()));
        if (terms.terms.empty())
            terms.terms.emplace_back(K[0], complex<double>(1.0, 0.0));
        auto f = from_coefficients(basis, terms);

        auto lattice = build_rank1_lattice(K);
        auto fft_rule = lattice_rule(lattice, K, u);
        CubatureRule direct_rule = fft_rule;
        direct_rule.backend = CubatureBackend::Direct;

        Anchor empty{DimSubset(), {}};
        auto via_fft = projected_coefficients(fft_rule, f.box, basis, empty);
        auto via_direct = projected_coefficients(direct_rule, f.box, basis, empty);
        for (std::size_t i = 0; i < K.size(); ++i)
            CHECK(std::abs(via_fft.values[i] - via_direct.values[i]) < 1e-10);
    }
}

TEST_CASE("least-squares backend recovers exact-cubature coefficients") {
    Rng rng(77);
    const int d = 2;
    auto basis = ProductBasis::uniform(chebyshev_basis(), d);
    const DimSubset u = DimSubset::range(1, d);
    std::vector<MultiIndex> members;
    for (Entry a = 0; a <= 4; ++a)
        for (Entry b = 0; b <= 2; ++b)
            members.push_back(MultiIndex({a, b}));
    IndexSet K(u, members);

    CoefficientList terms;
    terms.terms.emplace_back(MultiIndex({1, 0}), complex<double>(2.0, 0.0));
    terms.terms.emplace_back(MultiIndex({3, 2}), complex<double>(-0.5, 0.0));
    terms.terms.emplace_back(MultiIndex({0, 1}), complex<double>(0.25, 0.0));
    auto f = from_coefficients(basis, terms);

    // oversampled well-conditioned system: M >= 4 |K|
    CubatureRule rule;
    rule.u = u;
    rule.K = K;
    rule.M = static_cast<std::int64_t>(4 * K.size());
    rule.backend = CubatureBackend::LeastSquares;
    rule.nodes.resize(static_cast<std::size_t>(rule.M) * u.size());
    for (auto& x : rule.nodes)
        x = std::cos(std::numbers::pi * rng.uniform());
    rule.weights.assign(static_cast<std::size_t>(rule.M), 1.0 / static_cast<double>(rule.M));
    rule.weight_sum = 1.0;

    auto coeffs = projected_coefficients(rule, f.box, basis, Anchor{DimSubset(), {}});
    for (std::size_t i = 0; i < K.size(); ++i)
        CHECK(std::abs(coeffs.values[i] - f.coefficient(K[i])) < 1e-5);
}

TEST_CASE("sample accounting is exactly M per application") {
    auto basis = ProductBasis::uniform(fourier_basis(), 2);
    IndexSet K(DimSubset({1}), {MultiIndex({0}), MultiIndex({1}), MultiIndex({2})});
    auto rule = lattice_rule(build_rank1_lattice(K), K, DimSubset({1}));
    BlackBox f(2, [](std::span<const double>, std::size_t n, std::span<complex<double>> out) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 0.0;
    });
    Rng rng(4);
    const auto before = f.evaluations();
    auto coeffs = projected_coefficients(rule, f, basis, draw_anchor(basis, DimSubset({2}), rng));
    CHECK(f.evaluations() - before == static_cast<std::uint64_t>(rule.M));
    CHECK(coeffs.samples == static_cast<std::uint64_t>(rule.M));
}

TEST_CASE("projection error term: vanishing and single-term cases") {
    Rng rng(55);
    const int d = 3;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    const DimSubset u({1, 2});
    std::vector<MultiIndex> members;
    for (Entry a = -2; a <= 2; ++a)
        for (Entry b = -2; b <= 2; ++b)
            members.push_back(MultiIndex({a, b}));
    IndexSet K(u, members);
    auto rule = lattice_rule(build_rank1_lattice(K), K, u);
    Anchor anchor = draw_anchor(basis, u.complement(d), rng);

    CoefficientList f;
    f.terms.emplace_back(MultiIndex({1, 0, 2}), complex<double>(0.8, 0.1));
    f.terms.emplace_back(MultiIndex({-1, 2, 0}), complex<double>(0.3, 0.0));

    // J covering the support: Psi vanishes identically
    IndexSet J_all(DimSubset::range(1, d), {MultiIndex({1, 0, 2}), MultiIndex({-1, 2, 0})});
    for (const auto& v : projection_error_term(f, rule, J_all, basis, anchor))
        CHECK(std::abs(v) < 1e-15);

    // one term outside J with h_u in K: Psi concentrates on h_u (exact rule)
    IndexSet J_one(DimSubset::range(1, d), {MultiIndex({1, 0, 2})});
    auto psi = projection_error_term(f, rule, J_one, basis, anchor);
    const MultiIndex h_u({-1, 2});
    const auto expected = complex<double>(0.3, 0.0) *
                          eval_product(basis, u.complement(d), MultiIndex({0}), anchor.values);
    for (std::size_t i = 0; i < K.size(); ++i) {
        const auto target = (K[i] == h_u) ? expected : complex<double>(0.0);
        CHECK(std::abs(psi[i] - target) < 1e-10);
    }
}

TEST_CASE("split identity: fhat = in-J part + Psi") {
    // the split applies the exactness condition to the indices inside J, so
    // the rule must be exact on a K with P_u(J) inside K
    Rng rng(2024);
    const int d = 4;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    const DimSubset u({1, 3});
    const DimSubset uc = u.complement(d);
    const DimSubset full = DimSubset::range(1, d);

    for (int trial = 0; trial < 25; ++trial) {
        // random 10-term expansion
        CoefficientList terms;
        std::vector<MultiIndex> support;
        for (int i = 0; i < 10; ++i) {
            std::vector<Entry> kv(d);
            for (auto& e : kv)
                e = static_cast<Entry>(rng.below(7)) - 3;
            MultiIndex k(kv);
            support.push_back(k);
            terms.terms.emplace_back(
                k, std::polar(rng.uniform(0.1, 1.5), 2.0 * std::numbers::pi * rng.uniform()));
        }
        auto f = from_coefficients(basis, terms);

        // random J: subset of the support, so P_u(J) lies inside K below
        std::vector<MultiIndex> j_members;
        for (const auto& k : support)
            if (rng.uniform() < 0.5) j_members.push_back(k);
        IndexSet J(full, j_members);

        // rule exact on K = P_u(supp f), plus some random extra candidates
        std::vector<MultiIndex> k_members;
        for (const auto& h : support)
            k_members.push_back(restrict_to(h, full, u));
        for (int extra = 0; extra < 5; ++extra)
            k_members.push_back(MultiIndex({static_cast<Entry>(rng.below(7)) - 3,
                                            static_cast<Entry>(rng.below(7)) - 3}));
        IndexSet K(u, k_members);
        auto rule = lattice_rule(build_rank1_lattice(K), K, u);

        Anchor anchor = draw_anchor(basis, uc, rng);
        auto fhat = projected_coefficients(rule, f.box, basis, anchor);
        auto psi = projection_error_term(terms, rule, J, basis, anchor);

        for (std::size_t i = 0; i < K.size(); ++i) {
            complex<double> in_j = 0.0;
            for (const auto& [h, c] : terms.terms) {
                if (!J.contains(h)) continue;
                if (restrict_to(h, full, u) != K[i]) continue;
                in_j += c * eval_product(basis, uc, restrict_to(h, full, uc), anchor.values);
            }
            CHECK(std::abs(fhat.values[i] - (in_j + psi[i])) < 1e-10);
        }
    }
}

TEST_CASE("projection error magnitude respects the B^2 C_Q tail bound") {
    Rng rng(404);
    const int d = 3;
    auto basis = ProductBasis::uniform(fourier_basis(), d);
    const DimSubset u({2});
    std::vector<MultiIndex> members;
    for (Entry a = -3; a <= 3; ++a)
        members.push_back(MultiIndex({a}));
    IndexSet K(u, members);
    auto rule = lattice_rule(build_rank1_lattice(K), K, u);

    CoefficientList f;
    double tail = 0.0;
    for (int i = 0; i < 6; ++i) {
        std::vector<Entry> kv(d);
        for (auto& e : kv)
            e = static_cast<Entry>(rng.below(7)) - 3;
        const auto c = std::polar(rng.uniform(0.05, 0.8), 2.0 * std::numbers::pi * rng.uniform());
        f.terms.emplace_back(MultiIndex(kv), c);
        tail += std::abs(c);
    }
    IndexSet J(DimSubset::range(1, d), {}); // everything aliases through the rule
    const double B = basis.bound();
    const double bound = B * B * rule.weight_sum * tail;
    for (int trial = 0; trial < 1000; ++trial) {
        Anchor anchor = draw_anchor(basis, u.complement(d), rng);
        for (const auto& v : projection_error_term(f, rule, J, basis, anchor))
            CHECK(std::abs(v) <= bound + 1e-12);
    }
}

TEST_SUITE_END();
