#pragma once

#include "ocp2d/rng.hpp"

#include <cstdint>
#include <vector>

namespace ocp {

// ===========================================================================
// Exact finite-N engine at plasma parameter beta = 2, where the ensemble is
// determinantal. The Laplace transform of Delta_N factorizes,
//
//   P_hat_N(s) = prod_{l=1..N} [ int_0^inf e^{-t - 2 s sqrt(N t)} t^{l-1} dt
//                                / Gamma(l) ],
//
// and the unordered radii are distributed as independent variables
// xi_k / sqrt(N) with xi_k^2 ~ Gamma(k, 1).
// ===========================================================================

/// One normalized factor of the product formula, kept in log space.
struct FactorIntegral {
    int ell = 0;
    int n = 0;
    double s = 0.0;
    double log_value = 0.0;
};

/// log of the l-th normalized integral. Computed after the substitution
/// t = u^2 by locating the integrand maximum in log space and integrating a
/// window around it; safe up to l in the thousands. Relative error <= 1e-10.
double log_laplace_factor(int ell, int n, double s);

FactorIntegral laplace_factor(int ell, int n, double s);

/// -(1/(2 N^2)) sum_l log_laplace_factor(l, N, s): the finite-N estimate of
/// J(s) at beta = 2. Analytic in s for every finite N.
double scaled_log_laplace(int n, double s);

/// <xi_k^m> = Gamma(k + m/2) / Gamma(k).
double xi_moment(int k, int m);

/// First four cumulants of a single xi_k.
struct XiCumulants {
    int k = 0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    double kappa4 = 0.0;
    bool asymptotic_path = false; // safe path used (k above threshold)
};

/// Raw moment-to-cumulant conversion loses kappa4 to cancellation as k grows;
/// above this threshold the Stirling-series path is used instead.
inline constexpr int kXiCumulantAsymptoticThreshold = 1000;

XiCumulants xi_cumulants(int k);

/// Both paths exposed for overlap validation around the threshold.
XiCumulants xi_cumulants_raw(int k);        // extended-precision conversion
XiCumulants xi_cumulants_asymptotic(int k); // Stirling series in 1/k

/// Exact cumulants of Delta_N = N^{-3/2} sum xi_k at beta = 2, with the
/// rescaled columns of the N^{2(m-1)} kappa_m plot.
struct CumulantTable {
    int n = 0;
    double kappa[4] = {0, 0, 0, 0};    // kappa_1..kappa_4 of Delta_N
    double rescaled[4] = {0, 0, 0, 0}; // kappa1, N^2 k2, N^4 k3, N^6 k4
    bool cancellation_guard = false;   // safe path used for some k <= N
};

CumulantTable delta_cumulant_table(int n);

/// Partial sum sum_{k<=N} kappa4(xi_k) evaluated the naive way: float64
/// moments through lgamma and the textbook conversion. Loses all accuracy
/// for large N; kept as a diagnostic of the non-convergence seen when the
/// rescaled fourth cumulant is evaluated without cancellation control.
double delta_n6_kappa4_float64_raw(int n);

/// One draw of the N unordered radii {xi_k / sqrt(N)}.
struct RadialSampleSet {
    int n = 0;
    std::vector<double> radii;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

RadialSampleSet sample_radii(int n, CounterRng& rng);

} // namespace ocp
