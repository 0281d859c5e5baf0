#include "dimincr/basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace dimincr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Basis1D fourier_basis() {
    Basis1D b;
    b.name = "fourier";
    b.lo = 0.0;
    b.hi = 1.0;
    b.bound = 1.0;
    b.nonnegative_indices = false;
    b.eval = [](Entry k, double x) {
        return std::polar(1.0, kTwoPi * static_cast<double>(k) * x);
    };
    b.sample = [](Rng& rng) { return rng.uniform(); };
    return b;
}

Basis1D chebyshev_basis() {
    Basis1D b;
    b.name = "chebyshev";
    b.lo = -1.0;
    b.hi = 1.0;
    b.bound = std::numbers::sqrt2;
    b.nonnegative_indices = true;
    b.eval = [](Entry k, double x) -> std::complex<double> {
        if (k < 0)
            throw std::invalid_argument("chebyshev basis: negative index");
        if (k == 0)
            return 1.0;
        const double xc = std::clamp(x, -1.0, 1.0);
        return std::numbers::sqrt2 * std::cos(static_cast<double>(k) * std::acos(xc));
    };
    b.sample = [](Rng& rng) { return std::cos(std::numbers::pi * rng.uniform()); };
    return b;
}

namespace {
std::map<std::string, std::function<Basis1D()>>& registry() {
    static std::map<std::string, std::function<Basis1D()>> reg = {
        {"fourier", fourier_basis},
        {"chebyshev", chebyshev_basis},
    };
    return reg;
}
std::mutex registry_mutex;
} // namespace

void register_basis(const std::string& name, std::function<Basis1D()> factory) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    registry()[name] = std::move(factory);
}

Basis1D make_basis(const std::string& name) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto it = registry().find(name);
    if (it == registry().end())
        throw std::invalid_argument("unknown basis '" + name + "'");
    return it->second();
}

std::complex<double> eval_product(const ProductBasis& basis, const DimSubset& u,
                                  const MultiIndex& k, std::span<const double> xi) {
    if (u.size() != k.size() || u.size() != xi.size())
        throw std::invalid_argument("eval_product: dimension mismatch");
    std::complex<double> prod = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        prod *= basis.factors[static_cast<std::size_t>(u[i] - 1)].eval(k[i], xi[i]);
    return prod;
}

Anchor draw_anchor(const ProductBasis& basis, const DimSubset& u_c, Rng& rng) {
    Anchor anchor;
    anchor.dims = u_c;
    anchor.values.reserve(u_c.size());
    for (int dim : u_c)
        anchor.values.push_back(basis.factors[static_cast<std::size_t>(dim - 1)].sample(rng));
    return anchor;
}

} // namespace dimincr
