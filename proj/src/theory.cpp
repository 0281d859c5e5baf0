#include "dimincr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dimincr {

std::int64_t detection_iterations_bound(double B, double C, std::uint64_t I3d_size, double delta,
                                        double tail_sum, int d, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("detection_iterations_bound: epsilon must be in (0,1)");
    if (!(delta > 0.0))
        throw std::invalid_argument("detection_iterations_bound: delta must be positive");
    if (tail_sum < 0.0)
        throw std::invalid_argument("detection_iterations_bound: tail sum must be nonnegative");
    if (I3d_size < 1)
        throw std::invalid_argument("detection_iterations_bound: |I_3delta| must be >= 1");
    if (!(B >= 1.0))
        throw std::invalid_argument("detection_iterations_bound: B must be >= 1");
    if (!(C > 0.0))
        throw std::invalid_argument("detection_iterations_bound: C must be positive");
    if (d < 1)
        throw std::invalid_argument("detection_iterations_bound: d must be >= 1");

    const double size = static_cast<double>(I3d_size);
    const double factor = 1.0 + 1.5 * B * B * size + (B * B * B * C) / (2.0 * delta) * tail_sum;
    const double logs = std::log(3.0) + std::log(static_cast<double>(d)) + std::log(size) -
                        std::log(epsilon);
    return static_cast<std::int64_t>(std::ceil(factor * logs));
}

double q_value(double B, std::span<const double> slice_magnitudes, double delta_psi,
               double delta_plus, double C_Q, double tail_sum) {
    if (slice_magnitudes.empty())
        throw std::invalid_argument("q_value: empty coefficient slice");
    if (!(B >= 1.0) || !(C_Q > 0.0) || delta_psi < 0.0 || delta_plus < 0.0 || tail_sum < 0.0)
        throw std::invalid_argument("q_value: parameter out of domain");
    double max_c = 0.0, sum_c = 0.0;
    for (double m : slice_magnitudes) {
        if (m < 0.0) throw std::invalid_argument("q_value: magnitudes must be nonnegative");
        max_c = std::max(max_c, m);
        sum_c += m;
    }
    if (!(B * (delta_plus + delta_psi) < max_c))
        throw std::domain_error("q_value: requires B (delta_+ + delta_Psi) < max |c_h|");
    return 1.0 - (max_c / B - delta_psi - delta_plus) / (B * sum_c + B * B * C_Q * tail_sum);
}

double detection_failure_bound(double q, std::uint64_t I_delta_size, int r) {
    if (!(q >= 0.0 && q < 1.0))
        throw std::invalid_argument("detection_failure_bound: q must be in [0,1)");
    if (r < 1)
        throw std::invalid_argument("detection_failure_bound: r must be >= 1");
    return static_cast<double>(I_delta_size) * std::pow(q, r);
}

double false_positive_bound(double delta_psi, double delta_plus, int r) {
    if (!(delta_plus > 0.0) || delta_psi < 0.0)
        throw std::invalid_argument("false_positive_bound: thresholds out of domain");
    if (delta_psi >= delta_plus)
        throw std::invalid_argument("false_positive_bound: requires delta_psi < delta_plus");
    if (r < 1)
        throw std::invalid_argument("false_positive_bound: r must be >= 1");
    return 1.0 - std::pow(1.0 - delta_psi / delta_plus, r);
}

double small_value_probability_bound(double B_v, std::span<const double> coeff_magnitudes,
                                     double delta_psi, double delta_plus, double psi_sup) {
    if (coeff_magnitudes.empty())
        throw std::invalid_argument("small_value_probability_bound: empty expansion");
    if (!(B_v >= 1.0) || delta_psi < 0.0 || delta_plus < 0.0 || psi_sup < 0.0)
        throw std::invalid_argument("small_value_probability_bound: parameter out of domain");
    double max_c = 0.0, sum_c = 0.0;
    for (double m : coeff_magnitudes) {
        max_c = std::max(max_c, m);
        sum_c += m;
    }
    if (!(max_c > B_v * (delta_plus + delta_psi)))
        throw std::domain_error(
            "small_value_probability_bound: requires max |g_h| > B_v (delta_+ + delta_Psi)");
    return 1.0 - (max_c / B_v - delta_psi - delta_plus) / (B_v * sum_c + psi_sup);
}

} // namespace dimincr
