#include "ocp2d/sampler.hpp"

#include "ocp2d/quadrature.hpp"
#include "ocp2d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocp {

namespace {

double sq_dist(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double radius(Vec2 p) { return std::hypot(p.x, p.y); }

} // namespace

double energy(const GasConfiguration& config) {
    const auto& pos = config.positions;
    const int n = static_cast<int>(pos.size());
    const double s = config.params.tilt.value();

    // -(1/2) sum_{i != j} log r_ij == -sum_{i<j} log r_ij
    CompensatedSum pair_term;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r2 = sq_dist(pos[i], pos[j]);
            if (r2 == 0.0)
                throw std::domain_error("coincident particles: log(0) energy");
            pair_term.add(-0.5 * std::log(r2));
        }
    }
    CompensatedSum confinement;
    for (const Vec2& p : pos) {
        const double r = radius(p);
        confinement.add(0.5 * r * r + s * r);
    }
    return pair_term.value() + static_cast<double>(n) * confinement.value();
}

double delta_energy(const GasConfiguration& config, int index, Vec2 proposed) {
    const auto& pos = config.positions;
    const int n = static_cast<int>(pos.size());
    if (index < 0 || index >= n)
        throw std::invalid_argument("particle index out of range");
    const double s = config.params.tilt.value();
    const Vec2 current = pos[index];

    CompensatedSum pair_delta;
    for (int j = 0; j < n; ++j) {
        if (j == index) continue;
        const double r2_new = sq_dist(proposed, pos[j]);
        if (r2_new == 0.0) return std::numeric_limits<double>::infinity();
        const double r2_old = sq_dist(current, pos[j]);
        pair_delta.add(-0.5 * (std::log(r2_new) - std::log(r2_old)));
    }
    const double r_new = radius(proposed);
    const double r_old = radius(current);
    const double v_new = 0.5 * r_new * r_new + s * r_new;
    const double v_old = 0.5 * r_old * r_old + s * r_old;
    return pair_delta.value() + static_cast<double>(n) * (v_new - v_old);
}

double Histogram::fraction_below(double r) const {
    if (total <= 0.0) return 0.0;
    if (r <= lo) return 0.0;
    const double w = bin_width();
    double acc = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double edge_lo = lo + w * static_cast<double>(i);
        const double edge_hi = edge_lo + w;
        if (r >= edge_hi)
            acc += counts[i];
        else if (r > edge_lo)
            acc += counts[i] * (r - edge_lo) / w;
        else
            break;
    }
    return acc / total;
}

double ChainStats::mean_delta() const { return mean(delta_samples); }

double ChainStats::standard_error() const {
    return autocorrelated_standard_error(delta_samples);
}

double ChainStats::autocorrelation_time() const {
    return integrated_autocorrelation_time(delta_samples);
}

double ChainStats::geweke_z() const { return split_half_z(delta_samples); }

namespace {

void histogram_add(Histogram& h, double r) {
    const double w = h.bin_width();
    auto idx = static_cast<long>((r - h.lo) / w);
    idx = std::clamp(idx, 0L, static_cast<long>(h.counts.size()) - 1L);
    h.counts[static_cast<std::size_t>(idx)] += 1.0;
    h.total += 1.0;
}

} // namespace

ChainStats run_chain(const PlasmaParams& params, const Schedule& schedule,
                     CounterRng& rng) {
    if (params.n < 2) throw std::invalid_argument("N must be >= 2");
    if (!(params.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (schedule.sweeps <= schedule.effective_burn_in())
        throw std::invalid_argument("schedule leaves no post-burn-in sweeps");

    const int n = params.n;
    const double beta = params.beta;
    const int burn = schedule.effective_burn_in();

    GasConfiguration config;
    config.params = params;
    config.positions.resize(n);
    const double R0 = support_radii(params.tilt).outer_radius();
    for (Vec2& p : config.positions) {
        const double r = R0 * std::sqrt(rng.uniform());
        const double phi = 2.0 * M_PI * rng.uniform();
        p = {r * std::cos(phi), r * std::sin(phi)};
    }
    config.cached_energy = energy(config);

    double sigma = schedule.initial_step > 0.0
                       ? schedule.initial_step
                       : 1.0 / std::sqrt(static_cast<double>(n));

    ChainStats stats;
    stats.n_sweeps = schedule.sweeps;
    stats.burn_in = burn;
    stats.seed = rng.seed();
    stats.stream = rng.stream();
    stats.delta_samples.reserve(schedule.sweeps - burn);
    stats.radial_histogram = {0.0, schedule.hist_rmax,
                              std::vector<double>(schedule.hist_bins, 0.0), 0.0};
    stats.occupancy_histogram = stats.radial_histogram;

    long accepted_post = 0, proposed_post = 0;
    long accepted_window = 0, proposed_window = 0;

    for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
        for (int i = 0; i < n; ++i) {
            const Vec2 old_p = config.positions[i];
            const Vec2 new_p = {old_p.x + sigma * rng.normal(),
                                old_p.y + sigma * rng.normal()};
            const double dE = delta_energy(config, i, new_p);
            const double u = rng.uniform();
            if (dE <= 0.0 || u < std::exp(-beta * dE)) {
                config.positions[i] = new_p;
                config.cached_energy += dE;
                ++accepted_window;
                if (sweep >= burn) ++accepted_post;
            }
            ++proposed_window;
            if (sweep >= burn) ++proposed_post;
        }

        if (sweep < burn && (sweep + 1) % schedule.adapt_interval == 0) {
            const double rate = static_cast<double>(accepted_window) /
                                static_cast<double>(proposed_window);
            sigma *= std::exp(0.5 * (rate - schedule.target_acceptance));
            accepted_window = proposed_window = 0;
        }

        if ((sweep + 1) % 100 == 0) {
            const double recomputed = energy(config);
            if (!std::isfinite(recomputed))
                throw std::runtime_error("chain divergence: non-finite energy");
            if (std::fabs(config.cached_energy - recomputed) >
                1e-9 * (1.0 + std::fabs(recomputed)))
                throw std::logic_error("energy cache drifted beyond tolerance");
            config.cached_energy = recomputed;
        }

        if (sweep >= burn) {
            CompensatedSum dsum;
            for (const Vec2& p : config.positions) {
                const double r = radius(p);
                dsum.add(r);
                histogram_add(stats.occupancy_histogram, r);
                stats.max_radius_seen = std::max(stats.max_radius_seen, r);
            }
            stats.delta_samples.push_back(dsum.value() /
                                          static_cast<double>(n));
            if ((sweep - burn) % schedule.hist_stride == 0)
                for (const Vec2& p : config.positions)
                    histogram_add(stats.radial_histogram, radius(p));
        }
    }

    stats.acceptance_rate = proposed_post > 0
                                ? static_cast<double>(accepted_post) /
                                      static_cast<double>(proposed_post)
                                : 0.0;
    stats.step_size = sigma;
    return stats;
}

TiltedMeanReport tilted_mean_vs_theory(const PlasmaParams& params,
                                       const Schedule& schedule,
                                       CounterRng& rng) {
    const ChainStats stats = run_chain(params, schedule, rng);
    TiltedMeanReport rep;
    rep.empirical_mean = stats.mean_delta();
    rep.standard_error = stats.standard_error();
    rep.theory_x_of_s = mean_displacement(params.tilt);
    rep.z_score = (rep.empirical_mean - rep.theory_x_of_s) / rep.standard_error;
    return rep;
}

// ===========================================================================
// Free gas
// ===========================================================================

FreeGasReference::FreeGasReference(int n, double beta) : n_(n), beta_(beta) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    mean_ = std::sqrt(M_PI / (2.0 * beta));
    variance_ = (4.0 - M_PI) / (2.0 * beta * static_cast<double>(n));
}

double FreeGasReference::log_laplace_quadrature(double s) const {
    const double beta = beta_;
    const double hi =
        std::fabs(s) + std::sqrt(s * s + 90.0 / beta) + 10.0 / std::sqrt(beta);
    const double single = integrate_or_throw(
        [beta, s](double r) {
            return beta * r * std::exp(-beta * (0.5 * r * r + s * r));
        },
        0.0, hi, 1e-14, 1e-12, 4000);
    return static_cast<double>(n_) * std::log(single);
}

namespace {
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }
} // namespace

double FreeGasReference::log_laplace_paper_form(double s) const {
    const double inner =
        1.0 - std::sqrt(2.0 * M_PI * beta_) * s *
                  std::exp(-0.5 * beta_ * s * s) * std_normal_cdf(-beta_ * s);
    return static_cast<double>(n_) * std::log(inner);
}

double FreeGasReference::log_laplace_consistent_form(double s) const {
    const double inner = 1.0 - std::sqrt(2.0 * M_PI * beta_) * s *
                                   std::exp(0.5 * beta_ * s * s) *
                                   std_normal_cdf(-std::sqrt(beta_) * s);
    return static_cast<double>(n_) * std::log(inner);
}

double FreeGasReference::scaled_log_laplace(double s) const {
    return -log_laplace_quadrature(s) / (beta_ * static_cast<double>(n_));
}

FreeGasReference::McMean FreeGasReference::sample_mean(int draws,
                                                       CounterRng& rng) const {
    if (draws < 2) throw std::invalid_argument("need >= 2 draws");
    // Single-particle radii are Rayleigh(1/sqrt(beta)).
    std::vector<double> deltas;
    deltas.reserve(draws);
    for (int d = 0; d < draws; ++d) {
        CompensatedSum acc;
        for (int k = 0; k < n_; ++k) {
            double u = rng.uniform();
            while (u <= 0.0) u = rng.uniform();
            acc.add(std::sqrt(-2.0 * std::log(u) / beta_));
        }
        deltas.push_back(acc.value() / static_cast<double>(n_));
    }
    McMean out{};
    out.mean = ocp::mean(deltas);
    out.standard_error =
        std::sqrt(ocp::variance(deltas) / static_cast<double>(draws));
    return out;
}

} // namespace ocp
