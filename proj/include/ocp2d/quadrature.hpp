#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace ocp {

/// Thrown when an adaptive integration cannot reach the requested tolerance.
/// Carries the best value obtained and the achieved error estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double achieved)
        : std::runtime_error(what), value_(value), achieved_(achieved) {}
    double value() const noexcept { return value_; }
    double achieved_error() const noexcept { return achieved_; }

private:
    double value_;
    double achieved_;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    int intervals = 0;
};

/// Adaptive Gauss-Kronrod 15(7) on [a, b]. Splits the interval with the worst
/// local error estimate until sum(err) <= max(abs_tol, rel_tol*|value|).
QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              double a, double b,
                              double abs_tol = 1e-10,
                              double rel_tol = 1e-12,
                              int max_intervals = 2000);

/// Same, but throws QuadratureError if the tolerance was not met.
double integrate_or_throw(const std::function<double(double)>& f,
                          double a, double b,
                          double abs_tol = 1e-10,
                          double rel_tol = 1e-12,
                          int max_intervals = 2000);

} // namespace ocp
