#pragma once

#include "dimincr/detection.hpp"
#include "dimincr/test_functions.hpp"

#include <complex>
#include <cstdint>
#include <limits>
#include <span>

namespace dimincr {

struct ErrorReport {
    double rel_l2 = 0.0;
    double coeff_err_l1 = 0.0;
    double coeff_err_l2 = 0.0;
    double coeff_err_linf = 0.0;
    std::uint64_t samples = 0;
    double seconds = 0.0;
};

// sqrt(||f||^2 - sum_{k in I} |c_k|^2) / ||f||, radicand clamped at zero
// (warning on stderr when the overshoot exceeds rounding scale)
double relative_l2_error(const KnownCoefficientFunction& f, const IndexSet& I);

// ||fhat - c||_{l_p(I)} for p in {1, 2, inf}
double coefficient_error(const KnownCoefficientFunction& f, const IndexSet& I,
                         std::span<const std::complex<double>> coeffs, double p);

ErrorReport make_error_report(const KnownCoefficientFunction& f, const DetectionResult& result);

} // namespace dimincr
