#pragma once

#include "ocp2d/analytic.hpp"
#include "ocp2d/rng.hpp"

#include <cstdint>
#include <vector>

namespace ocp {

// ===========================================================================
// Metropolis Monte Carlo for the (tilted) 2D one-component plasma
//
//   H({r_k}; s) = -(1/2) sum_{i != j} log r_ij + N sum_k V_s(r_k),
//   V_s(r) = r^2/2 + s r,
//
// sampled from exp(-beta H) at arbitrary beta > 0. Single-particle Gaussian
// proposals; the step size is adapted toward ~35% acceptance during burn-in
// and frozen afterwards so the recorded chain is Markovian.
// ===========================================================================

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct PlasmaParams {
    int n = 2;
    double beta = 2.0;
    Tilt tilt{0.0};
};

struct GasConfiguration {
    std::vector<Vec2> positions;
    double cached_energy = 0.0;
    PlasmaParams params;
};

/// Full O(N^2) energy. Throws std::domain_error on coincident points.
double energy(const GasConfiguration& config);

/// O(N) energy change for moving particle `index` to `proposed`.
/// Returns +infinity for a proposal coinciding with another particle
/// (guaranteed rejection).
double delta_energy(const GasConfiguration& config, int index, Vec2 proposed);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> counts; // overflow goes to the last bin
    double total = 0.0;

    double bin_width() const {
        return (hi - lo) / static_cast<double>(counts.size());
    }
    /// Fraction of observations strictly below r (r should sit on a bin edge;
    /// partial bins are prorated linearly).
    double fraction_below(double r) const;
};

struct Schedule {
    int sweeps = 10000;
    int burn_in = -1; // <0: default 20% of sweeps
    double initial_step = 0.0; // <=0: 1/sqrt(N)
    double target_acceptance = 0.35;
    int adapt_interval = 50;
    int hist_bins = 40;
    double hist_rmax = 2.0;
    int hist_stride = 8; // sweep stride for the decorrelated histogram

    int effective_burn_in() const {
        return burn_in >= 0 ? burn_in : sweeps / 5;
    }
};

struct ChainStats {
    int n_sweeps = 0;
    int burn_in = 0;
    double acceptance_rate = 0.0; // post-burn-in only
    double step_size = 0.0;       // frozen value used after burn-in
    std::vector<double> delta_samples; // Delta_N, one per post-burn-in sweep
    Histogram radial_histogram;    // strided, suitable for chi^2 tests
    Histogram occupancy_histogram; // every post-burn-in sweep
    double max_radius_seen = 0.0;  // post-burn-in
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    double mean_delta() const;
    double standard_error() const; // autocorrelation-corrected
    double autocorrelation_time() const;
    double geweke_z() const;
};

/// Run the Metropolis chain. Initial configuration is i.i.d. uniform on the
/// disk of radius R0(s). Throws std::runtime_error if the energy diverges.
ChainStats run_chain(const PlasmaParams& params, const Schedule& schedule,
                     CounterRng& rng);

struct TiltedMeanReport {
    double empirical_mean = 0.0;
    double standard_error = 0.0;
    double theory_x_of_s = 0.0;
    double z_score = 0.0;
};

/// Chain mean of Delta_N against the mean-field value x(s).
TiltedMeanReport tilted_mean_vs_theory(const PlasmaParams& params,
                                       const Schedule& schedule,
                                       CounterRng& rng);

// ===========================================================================
// Non-interacting reference gas: drop the log repulsion (and the N scaling
// of the confinement), leaving i.i.d. single-particle radii with density
// beta r exp(-beta r^2/2). Analytic in s for every N: no phase transition.
// ===========================================================================

class FreeGasReference {
public:
    FreeGasReference(int n, double beta);

    int n() const noexcept { return n_; }
    double beta() const noexcept { return beta_; }
    double mean() const noexcept { return mean_; }         // sqrt(pi/(2 beta))
    double variance() const noexcept { return variance_; } // (4-pi)/(2 beta N)

    /// log <e^{-beta s N Delta_N}> by quadrature of the single-particle
    /// integral (ground truth).
    double log_laplace_quadrature(double s) const;

    /// The closed form as printed in the source material; disagrees with the
    /// quadrature route at second order in s (see log_laplace_consistent_form).
    double log_laplace_paper_form(double s) const;

    /// Closed form consistent with the quadrature route:
    ///   [1 - sqrt(2 pi beta) s e^{+beta s^2/2} Phi(-sqrt(beta) s)]^N.
    double log_laplace_consistent_form(double s) const;

    /// -(1/(beta N)) log <...>: the free-gas analogue of J. N-independent.
    double scaled_log_laplace(double s) const;

    /// Monte Carlo mean of Delta_N over `draws` independent configurations.
    struct McMean {
        double mean;
        double standard_error;
    };
    McMean sample_mean(int draws, CounterRng& rng) const;

private:
    int n_;
    double beta_;
    double mean_;
    double variance_;
};

} // namespace ocp
