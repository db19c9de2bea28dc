#include "ocp2d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocp {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty series");
    CompensatedSum acc;
    for (double v : xs) acc.add(v);
    return acc.value() / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 samples");
    const double m = mean(xs);
    CompensatedSum acc;
    for (double v : xs) acc.add((v - m) * (v - m));
    return acc.value() / static_cast<double>(xs.size() - 1);
}

double integrated_autocorrelation_time(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 8) return 0.5;
    const double m = mean(xs);
    double c0 = 0.0;
    for (double v : xs) c0 += (v - m) * (v - m);
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) return 0.5;

    double tau = 0.5;
    const std::size_t max_lag = n / 4;
    for (std::size_t t = 1; t <= max_lag; ++t) {
        double ct = 0.0;
        for (std::size_t i = 0; i + t < n; ++i)
            ct += (xs[i] - m) * (xs[i + t] - m);
        ct /= static_cast<double>(n - t) * c0;
        if (ct < 0.05) break; // noise cut; window ends at first small lag
        tau += ct;
    }
    return tau;
}

double autocorrelated_standard_error(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("need >= 2 samples");
    const double tau = integrated_autocorrelation_time(xs);
    return std::sqrt(variance(xs) * 2.0 * tau / static_cast<double>(xs.size()));
}

double split_half_z(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 16) throw std::invalid_argument("series too short for split test");
    auto first = xs.subspan(0, n / 2);
    auto second = xs.subspan(n / 2);
    const double se1 = autocorrelated_standard_error(first);
    const double se2 = autocorrelated_standard_error(second);
    return (mean(first) - mean(second)) / std::sqrt(se1 * se1 + se2 * se2);
}

double chi_square_quantile(double p, int dof) {
    if (dof < 1) throw std::invalid_argument("dof must be >= 1");
    // Wilson-Hilferty: chi2_p(k) ~ k (1 - 2/(9k) + z_p sqrt(2/(9k)))^3
    // Inverse normal via Acklam-style rational fit is overkill here; the
    // quantiles used are p = 0.99 and p = 0.95.
    double z;
    if (p == 0.99)
        z = 2.3263478740408408;
    else if (p == 0.95)
        z = 1.6448536269514722;
    else
        throw std::invalid_argument("unsupported chi-square quantile");
    const double k = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

ChiSquareResult chi_square_test(std::span<const double> observed_counts,
                                std::span<const double> expected_probs) {
    if (observed_counts.size() != expected_probs.size() ||
        observed_counts.empty())
        throw std::invalid_argument("chi-square: size mismatch");

    double total = 0.0, ptot = 0.0;
    for (double c : observed_counts) total += c;
    for (double p : expected_probs) ptot += p;
    if (total <= 0.0 || ptot <= 0.0)
        throw std::invalid_argument("chi-square: empty data");

    // Pool adjacent bins until every expected count is >= 5.
    std::vector<double> obs, expd;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed_counts.size(); ++i) {
        o_acc += observed_counts[i];
        e_acc += expected_probs[i] / ptot * total;
        if (e_acc >= 5.0) {
            obs.push_back(o_acc);
            expd.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0) {
        if (!expd.empty()) {
            obs.back() += o_acc;
            expd.back() += e_acc;
        } else {
            obs.push_back(o_acc);
            expd.push_back(e_acc);
        }
    }

    ChiSquareResult r;
    r.dof = static_cast<int>(obs.size()) - 1;
    if (r.dof < 1) {
        r.dof = 1;
        r.critical_1pct = chi_square_quantile(0.99, 1);
        r.pass = true;
        return r;
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double d = obs[i] - expd[i];
        r.statistic += d * d / expd[i];
    }
    r.critical_1pct = chi_square_quantile(0.99, r.dof);
    r.pass = r.statistic <= r.critical_1pct;
    return r;
}

} // namespace ocp
