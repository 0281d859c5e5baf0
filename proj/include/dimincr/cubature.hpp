#pragma once

#include "dimincr/basis.hpp"
#include "dimincr/black_box.hpp"
#include "dimincr/multi_index.hpp"
#include "dimincr/rng.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace dimincr {

enum class CubatureBackend { Direct, LatticeFft, LeastSquares };

// Node set {(j z mod M)/M : j = 0..M-1}. The reconstruction property for K
// requires (k1 - k2) . z != 0 (mod M) for all distinct k1, k2 in K.
struct Rank1Lattice {
    std::vector<Entry> z;
    std::int64_t M = 0;
};

struct LatticeOptions {
    std::int64_t M_cap = 100'000'000;
};

// Deterministic prime-M sweep with component-by-component choice of z,
// validated against the projected prefixes at every stage. Throws
// ConstructionFailure when no admissible (z, M) exists below the cap.
Rank1Lattice build_rank1_lattice(const IndexSet& K, const LatticeOptions& options = {});

// exhaustive check of the reconstruction property (independent of the search)
bool reconstruction_property(const Rank1Lattice& lattice, const IndexSet& K);

struct CubatureRule {
    DimSubset u;
    IndexSet K;
    std::int64_t M = 0;
    std::vector<double> nodes; // M x |u| row-major
    std::vector<std::complex<double>> weights;
    double weight_sum = 0.0; // C_Q
    CubatureBackend backend = CubatureBackend::Direct;
    std::optional<Rank1Lattice> lattice;
};

// equal-weight rule on the lattice nodes; exact for Fourier on K
CubatureRule lattice_rule(const Rank1Lattice& lattice, const IndexSet& K, const DimSubset& u);

// Monte Carlo node draw with least-squares evaluation. Fourier factors:
// M = ceil(|K| ln |K|) uniform nodes. Chebyshev factors: m = sum_k 2^{||k||_0},
// M = ceil(m ln m) nodes from the arcsine measure. Requires |K| >= 2.
CubatureRule build_mc_rule(const IndexSet& K, const DimSubset& u, const ProductBasis& basis, Rng& rng);

struct ProjectedCoefficients {
    IndexSet K;
    std::vector<std::complex<double>> values; // aligned with K
    std::uint64_t samples = 0;
};

// Binds a rule to a basis and black box, caching what the backend reuses
// across anchors (basis matrix for direct / least-squares evaluation).
// Holds references; keep rule, basis and black box alive while in use.
class CoefficientEvaluator {
  public:
    CoefficientEvaluator(const CubatureRule& rule, const ProductBasis& basis, const BlackBox& f);

    // one application of the rule at the given anchor; consumes exactly M samples
    ProjectedCoefficients evaluate(const Anchor& anchor) const;

  private:
    const CubatureRule* rule_;
    const ProductBasis* basis_;
    const BlackBox* f_;
    std::vector<std::complex<double>> matrix_; // M x |K|, Direct / LeastSquares
    std::vector<std::size_t> fft_bins_;        // LatticeFft: k -> (k.z mod M)
};

// convenience wrapper for one-off applications
ProjectedCoefficients projected_coefficients(const CubatureRule& rule, const BlackBox& f,
                                             const ProductBasis& basis, const Anchor& anchor);

// max over pairs k1,k2 in K of |sum_j w_j Phi_k1(xi_j) conj(Phi_k2(xi_j)) - delta|;
// guarded at |K| <= 2000
double exactness_check(const CubatureRule& rule, const IndexSet& K, const ProductBasis& basis);

// explicit finite expansion, oracle use only
struct CoefficientList {
    std::vector<std::pair<MultiIndex, std::complex<double>>> terms; // full-d indices
};

// Psi^{Q,J}_{u,k}(anchor) for every k in rule.K; J lives on the full dimensions
std::vector<std::complex<double>> projection_error_term(const CoefficientList& f,
                                                        const CubatureRule& rule, const IndexSet& J,
                                                        const ProductBasis& basis,
                                                        const Anchor& anchor);

} // namespace dimincr
