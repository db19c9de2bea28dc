#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ocp {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double mean(std::span<const double> xs);
double variance(std::span<const double> xs); // unbiased

/// Integrated autocorrelation time by the windowed estimator: accumulate
/// normalized autocovariances until the first drop below the noise cut.
/// Returns tau >= 0.5 (0.5 = uncorrelated samples convention tau_int = 1/2).
double integrated_autocorrelation_time(std::span<const double> xs);

/// Standard error of the mean inflated by 2*tau_int.
double autocorrelated_standard_error(std::span<const double> xs);

/// Geweke-style convergence z: compare means of the first and second half.
double split_half_z(std::span<const double> xs);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double critical_1pct = 0.0; // chi^2_{0.99}(dof)
    bool pass = false;
};

/// Pearson chi-squared of observed counts against expected probabilities
/// (probabilities are renormalized; bins with tiny expectation are pooled).
ChiSquareResult chi_square_test(std::span<const double> observed_counts,
                                std::span<const double> expected_probs);

/// chi^2 distribution quantile at p (Wilson-Hilferty approximation).
double chi_square_quantile(double p, int dof);

} // namespace ocp
