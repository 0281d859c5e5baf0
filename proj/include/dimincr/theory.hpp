#pragma once

#include <cstdint>
#include <span>

namespace dimincr {

// Number of detection iterations guaranteeing per-step failure probability
// <= eps/(3d):
//   ceil((1 + 3/2 B^2 |I_3d| + B^3 C/(2 delta) tail) (ln 3 + ln d + ln|I_3d| - ln eps))
std::int64_t detection_iterations_bound(double B, double C, std::uint64_t I3d_size, double delta,
                                        double tail_sum, int d, double epsilon);

// Per-candidate small-value probability bound
//   q = 1 - (B^{-1} max|c| - dpsi - dplus) / (B sum|c| + B^2 C_Q tail)
// over the coefficient slice {h = (k,h_uc)_u in I_delta}. Requires
// B (dplus + dpsi) < max|c|.
double q_value(double B, std::span<const double> slice_magnitudes, double delta_psi,
               double delta_plus, double C_Q, double tail_sum);

// union-bound companion: |I_delta| q^r
double detection_failure_bound(double q, std::uint64_t I_delta_size, int r);

// chance of an index outside I_3delta passing the threshold in at least one
// of r iterations: 1 - (1 - dpsi/dplus)^r; requires 0 <= dpsi < dplus
double false_positive_bound(double delta_psi, double delta_plus, int r);

// small-value probability for an explicit expansion g (+ perturbation Psi):
//   q = 1 - (B_v^{-1} max|g_h| - dpsi - dplus) / (B_v sum|g_h| + sup|Psi|)
double small_value_probability_bound(double B_v, std::span<const double> coeff_magnitudes,
                                     double delta_psi, double delta_plus, double psi_sup);

} // namespace dimincr
