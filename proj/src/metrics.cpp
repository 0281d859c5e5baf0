#include "dimincr/metrics.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace dimincr {

double relative_l2_error(const KnownCoefficientFunction& f, const IndexSet& I) {
    if (!(f.norm_sq > 0.0))
        throw std::invalid_argument("relative_l2_error: zero-norm function");
    double captured = 0.0;
    for (const auto& k : I)
        captured += std::norm(f.coefficient(k));
    double radicand = f.norm_sq - captured;
    if (radicand < 0.0) {
        if (radicand < -1e-10 * f.norm_sq)
            std::cerr << "relative_l2_error: radicand clamped (" << radicand << ")\n";
        radicand = 0.0;
    }
    return std::sqrt(radicand / f.norm_sq);
}

double coefficient_error(const KnownCoefficientFunction& f, const IndexSet& I,
                         std::span<const std::complex<double>> coeffs, double p) {
    if (coeffs.size() != I.size())
        throw std::invalid_argument("coefficient_error: coefficients not aligned with I");
    if (std::isinf(p)) {
        double worst = 0.0;
        for (std::size_t i = 0; i < I.size(); ++i)
            worst = std::max(worst, std::abs(coeffs[i] - f.coefficient(I[i])));
        return worst;
    }
    if (p == 1.0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < I.size(); ++i)
            acc += std::abs(coeffs[i] - f.coefficient(I[i]));
        return acc;
    }
    if (p == 2.0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < I.size(); ++i)
            acc += std::norm(coeffs[i] - f.coefficient(I[i]));
        return std::sqrt(acc);
    }
    throw std::invalid_argument("coefficient_error: p must be 1, 2 or inf");
}

ErrorReport make_error_report(const KnownCoefficientFunction& f, const DetectionResult& result) {
    ErrorReport report;
    report.rel_l2 = relative_l2_error(f, result.I);
    report.coeff_err_l1 = coefficient_error(f, result.I, result.coefficients, 1.0);
    report.coeff_err_l2 = coefficient_error(f, result.I, result.coefficients, 2.0);
    report.coeff_err_linf =
        coefficient_error(f, result.I, result.coefficients, std::numeric_limits<double>::infinity());
    report.samples = result.total_samples;
    report.seconds = result.seconds;
    return report;
}

} // namespace dimincr
