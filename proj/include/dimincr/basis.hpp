#pragma once

#include "dimincr/multi_index.hpp"
#include "dimincr/rng.hpp"

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dimincr {

// One-dimensional orthonormal basis, bounded by `bound`, with a sampler for
// its orthogonality measure. Evaluation is pure and reentrant.
struct Basis1D {
    std::string name;
    double lo = 0.0, hi = 1.0; // domain interval
    double bound = 1.0;        // B_j = max_k sup |phi_k|
    bool nonnegative_indices = false;
    std::function<std::complex<double>(Entry k, double x)> eval;
    std::function<double(Rng&)> sample;
};

// exp(2 pi i k x) on [0,1), B = 1, uniform measure
Basis1D fourier_basis();

// orthonormal Chebyshev system on [-1,1]: phi_0 = 1, phi_k = sqrt(2) cos(k acos x),
// B = sqrt(2), arcsine measure
Basis1D chebyshev_basis();

// extensible registry; fourier and chebyshev are pre-registered
void register_basis(const std::string& name, std::function<Basis1D()> factory);
Basis1D make_basis(const std::string& name);

struct ProductBasis {
    std::vector<Basis1D> factors;

    static ProductBasis uniform(const Basis1D& factor, int d) {
        ProductBasis basis;
        basis.factors.assign(static_cast<std::size_t>(d), factor);
        return basis;
    }

    int dimension() const { return static_cast<int>(factors.size()); }

    double bound() const {
        double b = 1.0;
        for (const auto& f : factors)
            b *= f.bound;
        return b;
    }

    double bound(const DimSubset& u) const {
        double b = 1.0;
        for (int dim : u)
            b *= factors[static_cast<std::size_t>(dim - 1)].bound;
        return b;
    }
};

// fixed values for the dimensions outside the active subset
struct Anchor {
    DimSubset dims; // u^c
    std::vector<double> values;
};

// Phi_{u,k}(xi) = prod_{j in u} phi_{j,k_j}(xi_j)
std::complex<double> eval_product(const ProductBasis& basis, const DimSubset& u,
                                  const MultiIndex& k, std::span<const double> xi);

// coordinates independently drawn from the respective factor measures
Anchor draw_anchor(const ProductBasis& basis, const DimSubset& u_c, Rng& rng);

} // namespace dimincr
