#include "dimincr/cubature.hpp"

#include "dimincr/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace dimincr {

namespace {

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

std::int64_t next_prime(std::int64_t n) {
    while (!is_prime(n))
        ++n;
    return n;
}

std::int64_t mod_reduce(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

// Component-by-component attempt for a fixed prime M. Keeps the partial maps
// prefix -> residue injective at every stage; succeeding at the last
// component yields the reconstruction property for K itself.
bool try_build_z(const IndexSet& K, std::int64_t M, std::vector<Entry>& z_out) {
    const std::size_t t = K.dims().size();
    // groups of members sharing the current prefix, one residue per group
    std::vector<std::size_t> group_of(K.size(), 0);
    std::vector<std::int64_t> residue = {0};

    std::vector<Entry> z;
    z.reserve(t);
    for (std::size_t comp = 0; comp < t; ++comp) {
        // split groups by the value of component `comp`
        struct NewGroup {
            std::int64_t base;
            Entry value;
        };
        std::vector<NewGroup> groups;
        std::vector<std::size_t> new_group_of(K.size());
        std::unordered_map<std::uint64_t, std::size_t> seen;
        seen.reserve(K.size() * 2);
        for (std::size_t i = 0; i < K.size(); ++i) {
            const Entry v = K[i][comp];
            const std::uint64_t key =
                (static_cast<std::uint64_t>(group_of[i]) << 32) ^
                static_cast<std::uint64_t>(static_cast<std::uint32_t>(static_cast<std::int32_t>(v)));
            auto [it, inserted] = seen.emplace(key, groups.size());
            if (inserted)
                groups.push_back({residue[group_of[i]], v});
            new_group_of[i] = it->second;
        }

        // bad z values are determined by pairwise collisions, at most one per
        // pair, so for M past ~|groups|^2/2 a full sweep always succeeds;
        // below that a bounded sweep keeps failed primes cheap
        const auto n_groups = static_cast<std::int64_t>(groups.size());
        const bool sweep_all = M > n_groups * n_groups / 2;
        const std::int64_t z_budget = sweep_all ? M - 1 : std::min<std::int64_t>(M - 1, 3000);

        std::int64_t chosen = -1;
        std::unordered_set<std::int64_t> used;
        used.reserve(groups.size() * 2);
        for (std::int64_t z_try = 1; z_try <= z_budget; ++z_try) {
            used.clear();
            bool ok = true;
            for (const auto& g : groups) {
                const std::int64_t r = mod_reduce(g.base + mod_reduce(g.value, M) * z_try, M);
                if (!used.insert(r).second) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                chosen = z_try;
                break;
            }
        }
        if (chosen < 0) return false;

        z.push_back(chosen);
        residue.resize(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g)
            residue[g] = mod_reduce(groups[g].base + mod_reduce(groups[g].value, M) * chosen, M);
        group_of = std::move(new_group_of);
    }
    z_out = std::move(z);
    return true;
}

} // namespace

Rank1Lattice build_rank1_lattice(const IndexSet& K, const LatticeOptions& options) {
    if (K.empty())
        throw std::invalid_argument("build_rank1_lattice: empty candidate set");
    const std::size_t t = K.dims().size();
    if (K.size() == 1)
        return Rank1Lattice{std::vector<Entry>(t, 1), 1};

    Entry spread = 0;
    for (std::size_t comp = 0; comp < t; ++comp) {
        Entry lo = K[0][comp], hi = K[0][comp];
        for (const auto& k : K) {
            lo = std::min(lo, k[comp]);
            hi = std::max(hi, k[comp]);
        }
        spread = std::max(spread, hi - lo);
    }

    std::int64_t M = next_prime(std::max<std::int64_t>(2 * static_cast<std::int64_t>(K.size()) + 1,
                                                       static_cast<std::int64_t>(spread)));
    while (M <= options.M_cap) {
        std::vector<Entry> z;
        if (try_build_z(K, M, z))
            return Rank1Lattice{std::move(z), M};
        M = next_prime(M + std::max<std::int64_t>(1, M / 2));
    }
    throw ConstructionFailure("build_rank1_lattice: no admissible lattice below M = " +
                              std::to_string(options.M_cap));
}

bool reconstruction_property(const Rank1Lattice& lattice, const IndexSet& K) {
    if (lattice.z.size() != K.dims().size())
        throw std::invalid_argument("reconstruction_property: component count mismatch");
    std::unordered_set<std::int64_t> residues;
    residues.reserve(K.size() * 2);
    for (const auto& k : K) {
        std::int64_t r = 0;
        for (std::size_t j = 0; j < lattice.z.size(); ++j)
            r = mod_reduce(r + mod_reduce(k[j], lattice.M) * lattice.z[j], lattice.M);
        if (!residues.insert(r).second)
            return false;
    }
    return true;
}

CubatureRule lattice_rule(const Rank1Lattice& lattice, const IndexSet& K, const DimSubset& u) {
    if (u.size() != lattice.z.size())
        throw std::invalid_argument("lattice_rule: dimension mismatch");
    CubatureRule rule;
    rule.u = u;
    rule.K = K;
    rule.M = lattice.M;
    rule.backend = CubatureBackend::LatticeFft;
    rule.lattice = lattice;
    rule.nodes.resize(static_cast<std::size_t>(lattice.M) * u.size());
    for (std::int64_t j = 0; j < lattice.M; ++j)
        for (std::size_t c = 0; c < u.size(); ++c) {
            const std::int64_t num = (j * (lattice.z[c] % lattice.M)) % lattice.M;
            rule.nodes[static_cast<std::size_t>(j) * u.size() + c] =
                static_cast<double>(num) / static_cast<double>(lattice.M);
        }
    rule.weights.assign(static_cast<std::size_t>(lattice.M), 1.0 / static_cast<double>(lattice.M));
    rule.weight_sum = 1.0;
    return rule;
}

CubatureRule build_mc_rule(const IndexSet& K, const DimSubset& u, const ProductBasis& basis, Rng& rng) {
    if (K.size() < 2)
        throw std::invalid_argument("build_mc_rule: needs |K| >= 2");
    const bool chebyshev = basis.factors[static_cast<std::size_t>(u[0] - 1)].name == "chebyshev";
    double m;
    if (chebyshev) {
        m = 0.0;
        for (const auto& k : K)
            m += std::ldexp(1.0, static_cast<int>(k.nonzero_count()));
    } else {
        m = static_cast<double>(K.size());
    }
    const auto M = static_cast<std::int64_t>(std::ceil(m * std::log(m)));

    CubatureRule rule;
    rule.u = u;
    rule.K = K;
    rule.M = M;
    rule.backend = CubatureBackend::LeastSquares;
    rule.nodes.resize(static_cast<std::size_t>(M) * u.size());
    for (std::int64_t j = 0; j < M; ++j)
        for (std::size_t c = 0; c < u.size(); ++c)
            rule.nodes[static_cast<std::size_t>(j) * u.size() + c] =
                basis.factors[static_cast<std::size_t>(u[c] - 1)].sample(rng);
    rule.weights.assign(static_cast<std::size_t>(M), 1.0 / static_cast<double>(M));
    rule.weight_sum = 1.0;
    return rule;
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

constexpr std::size_t kMatrixEntryLimit = 30'000'000;

std::vector<std::complex<double>> basis_matrix(const CubatureRule& rule, const ProductBasis& basis) {
    const std::size_t M = static_cast<std::size_t>(rule.M);
    const std::size_t nk = rule.K.size();
    if (M * nk > kMatrixEntryLimit)
        throw std::runtime_error("cubature: basis matrix too large to materialize");
    std::vector<std::complex<double>> A(M * nk);
    const std::size_t t = rule.u.size();
    for (std::size_t j = 0; j < M; ++j) {
        std::span<const double> xi(rule.nodes.data() + j * t, t);
        for (std::size_t c = 0; c < nk; ++c)
            A[j * nk + c] = eval_product(basis, rule.u, rule.K[c], xi);
    }
    return A;
}

// conjugate gradient on the normal equations A^H A x = A^H y (paper caps:
// 20 iterations, relative residual 1e-6)
std::vector<std::complex<double>> solve_normal_equations(const std::vector<std::complex<double>>& A,
                                                         std::size_t rows, std::size_t cols,
                                                         const std::vector<std::complex<double>>& y) {
    constexpr int kMaxIterations = 20;
    constexpr double kTolerance = 1e-6;

    auto apply = [&](const std::vector<std::complex<double>>& x,
                     std::vector<std::complex<double>>& ax) {
        // ax = A x
        for (std::size_t j = 0; j < rows; ++j) {
            std::complex<double> acc = 0.0;
            const std::complex<double>* row = A.data() + j * cols;
            for (std::size_t c = 0; c < cols; ++c)
                acc += row[c] * x[c];
            ax[j] = acc;
        }
    };
    auto apply_adjoint = [&](const std::vector<std::complex<double>>& v,
                             std::vector<std::complex<double>>& atv) {
        std::fill(atv.begin(), atv.end(), std::complex<double>(0.0));
        for (std::size_t j = 0; j < rows; ++j) {
            const std::complex<double>* row = A.data() + j * cols;
            const std::complex<double> vj = v[j];
            for (std::size_t c = 0; c < cols; ++c)
                atv[c] += std::conj(row[c]) * vj;
        }
    };
    auto norm2 = [](const std::vector<std::complex<double>>& v) {
        double s = 0.0;
        for (const auto& e : v)
            s += std::norm(e);
        return s;
    };

    std::vector<std::complex<double>> x(cols, 0.0), r(cols), p(cols), ap(rows), atap(cols);
    apply_adjoint(y, r); // r = A^H y - A^H A x with x = 0
    const double rhs_norm2 = norm2(r);
    if (rhs_norm2 == 0.0) return x;
    p = r;
    double r_norm2 = rhs_norm2;
    for (int it = 0; it < kMaxIterations; ++it) {
        if (std::sqrt(r_norm2 / rhs_norm2) <= kTolerance) break;
        apply(p, ap);
        apply_adjoint(ap, atap);
        std::complex<double> denom = 0.0;
        for (std::size_t c = 0; c < cols; ++c)
            denom += std::conj(p[c]) * atap[c];
        if (std::abs(denom) == 0.0) break;
        const std::complex<double> alpha = r_norm2 / denom;
        for (std::size_t c = 0; c < cols; ++c) {
            x[c] += alpha * p[c];
            r[c] -= alpha * atap[c];
        }
        const double r_new = norm2(r);
        const double beta = r_new / r_norm2;
        for (std::size_t c = 0; c < cols; ++c)
            p[c] = r[c] + beta * p[c];
        r_norm2 = r_new;
    }
    return x;
}

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out(in.size());
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(in.size()),
        reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

} // namespace

CoefficientEvaluator::CoefficientEvaluator(const CubatureRule& rule, const ProductBasis& basis,
                                           const BlackBox& f)
    : rule_(&rule), basis_(&basis), f_(&f) {
    switch (rule.backend) {
        case CubatureBackend::LatticeFft: {
            const auto& lattice = *rule.lattice;
            fft_bins_.reserve(rule.K.size());
            for (const auto& k : rule.K) {
                std::int64_t r = 0;
                for (std::size_t c = 0; c < lattice.z.size(); ++c)
                    r = mod_reduce(r + mod_reduce(k[c], lattice.M) * lattice.z[c], lattice.M);
                fft_bins_.push_back(static_cast<std::size_t>(r));
            }
            break;
        }
        case CubatureBackend::Direct:
        case CubatureBackend::LeastSquares:
            matrix_ = basis_matrix(rule, basis);
            break;
    }
}

ProjectedCoefficients CoefficientEvaluator::evaluate(const Anchor& anchor) const {
    const auto& rule = *rule_;
    const std::size_t M = static_cast<std::size_t>(rule.M);
    const std::size_t t = rule.u.size();
    const auto d = static_cast<std::size_t>(f_->dimension());
    if (anchor.dims.size() + t != d)
        throw std::invalid_argument("projected_coefficients: anchor does not complement u");

    // assemble full-dimensional sampling nodes (xi_j, anchor)_u
    std::vector<double> points(M * d);
    std::vector<std::size_t> u_slot(t), a_slot(anchor.dims.size());
    for (std::size_t c = 0; c < t; ++c)
        u_slot[c] = static_cast<std::size_t>(rule.u[c] - 1);
    for (std::size_t c = 0; c < anchor.dims.size(); ++c)
        a_slot[c] = static_cast<std::size_t>(anchor.dims[c] - 1);
    for (std::size_t j = 0; j < M; ++j) {
        double* row = points.data() + j * d;
        for (std::size_t c = 0; c < t; ++c)
            row[u_slot[c]] = rule.nodes[j * t + c];
        for (std::size_t c = 0; c < a_slot.size(); ++c)
            row[a_slot[c]] = anchor.values[c];
    }
    const std::vector<std::complex<double>> y = f_->evaluate_batch(points);

    ProjectedCoefficients result;
    result.K = rule.K;
    result.samples = M;
    const std::size_t nk = rule.K.size();
    result.values.assign(nk, 0.0);

    switch (rule.backend) {
        case CubatureBackend::Direct: {
            for (std::size_t j = 0; j < M; ++j) {
                const std::complex<double> wy = rule.weights[j] * y[j];
                const std::complex<double>* row = matrix_.data() + j * nk;
                for (std::size_t c = 0; c < nk; ++c)
                    result.values[c] += wy * std::conj(row[c]);
            }
            break;
        }
        case CubatureBackend::LatticeFft: {
            const auto spectrum = fft_forward(y);
            const double scale = 1.0 / static_cast<double>(M);
            for (std::size_t c = 0; c < nk; ++c)
                result.values[c] = spectrum[fft_bins_[c]] * scale;
            break;
        }
        case CubatureBackend::LeastSquares: {
            result.values = solve_normal_equations(matrix_, M, nk, y);
            break;
        }
    }
    return result;
}

ProjectedCoefficients projected_coefficients(const CubatureRule& rule, const BlackBox& f,
                                             const ProductBasis& basis, const Anchor& anchor) {
    return CoefficientEvaluator(rule, basis, f).evaluate(anchor);
}

double exactness_check(const CubatureRule& rule, const IndexSet& K, const ProductBasis& basis) {
    if (K.size() > 2000)
        throw std::invalid_argument("exactness_check: |K| exceeds the pairwise guard");
    const std::size_t M = static_cast<std::size_t>(rule.M);
    const std::size_t nk = K.size();
    const std::size_t t = rule.u.size();
    std::vector<std::complex<double>> B(M * nk);
    for (std::size_t j = 0; j < M; ++j) {
        std::span<const double> xi(rule.nodes.data() + j * t, t);
        for (std::size_t c = 0; c < nk; ++c)
            B[j * nk + c] = eval_product(basis, rule.u, K[c], xi);
    }
    double max_dev = 0.0;
    for (std::size_t c1 = 0; c1 < nk; ++c1)
        for (std::size_t c2 = c1; c2 < nk; ++c2) {
            std::complex<double> acc = 0.0;
            for (std::size_t j = 0; j < M; ++j)
                acc += rule.weights[j] * B[j * nk + c1] * std::conj(B[j * nk + c2]);
            const double dev = std::abs(acc - (c1 == c2 ? 1.0 : 0.0));
            max_dev = std::max(max_dev, dev);
        }
    return max_dev;
}

std::vector<std::complex<double>> projection_error_term(const CoefficientList& f,
                                                        const CubatureRule& rule, const IndexSet& J,
                                                        const ProductBasis& basis,
                                                        const Anchor& anchor) {
    const std::size_t M = static_cast<std::size_t>(rule.M);
    const std::size_t nk = rule.K.size();
    const std::size_t t = rule.u.size();
    const DimSubset full = DimSubset::range(1, basis.dimension());
    std::vector<std::complex<double>> psi(nk, 0.0);
    for (const auto& [h, c_h] : f.terms) {
        if (J.contains(h)) continue;
        const MultiIndex h_u = restrict_to(h, full, rule.u);
        const MultiIndex h_uc = restrict_to(h, full, anchor.dims);
        const std::complex<double> outer = c_h * eval_product(basis, anchor.dims, h_uc, anchor.values);
        for (std::size_t c = 0; c < nk; ++c) {
            std::complex<double> inner = 0.0;
            for (std::size_t j = 0; j < M; ++j) {
                std::span<const double> xi(rule.nodes.data() + j * t, t);
                inner += rule.weights[j] * eval_product(basis, rule.u, h_u, xi) *
                         std::conj(eval_product(basis, rule.u, rule.K[c], xi));
            }
            psi[c] += outer * inner;
        }
    }
    return psi;
}

} // namespace dimincr
