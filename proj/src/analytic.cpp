#include "ocp2d/analytic.hpp"

#include "ocp2d/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocp {

namespace {

double require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be finite");
    return v;
}

// sign(s) with the convention used by the one-sided branches.
double branch_sign(double s, Side side) {
    if (s > 0.0) return 1.0;
    if (s < 0.0) return -1.0;
    switch (side) {
        case Side::left: return -1.0;
        case Side::right: return 1.0;
        case Side::automatic: return 1.0; // callers decide when this is legal
    }
    return 1.0;
}

} // namespace

Tilt::Tilt(double s) : s_(require_finite(s, "tilt s")) {}

double tilted_potential(Tilt s, double r) {
    return 0.5 * r * r + s.value() * r;
}

double tilted_potential_derivative(Tilt s, double r) {
    return r + s.value();
}

EquilibriumMeasure support_radii(Tilt s) {
    const double sv = s.value();
    const double r0 = std::max(0.0, -sv);
    const double R0 = 0.5 * (std::sqrt(sv * sv + 4.0) - sv);
    return EquilibriumMeasure(r0, R0, s);
}

double EquilibriumMeasure::radial_marginal(double r) const {
    if (r < 0.0) throw std::invalid_argument("radius must be >= 0");
    if (r < r0_ || r > R0_) return 0.0;
    return 2.0 * r + s_.value();
}

double EquilibriumMeasure::planar_density(double r) const {
    const double marginal = radial_marginal(r);
    if (marginal == 0.0) return 0.0;
    return marginal / (2.0 * M_PI * r);
}

double mean_displacement(Tilt s) {
    const double sv = s.value();
    const double w = std::sqrt(sv * sv + 4.0);
    const double a = std::fabs(sv);
    return (w * w * w - 6.0 * sv - a * a * a) / 12.0;
}

double cumulant_gf(Tilt s) {
    const double sv = s.value();
    const double w = std::sqrt(sv * sv + 4.0);
    const double a = std::fabs(sv);
    return 0.5 * std::asinh(0.5 * sv) - 0.25 * sv * sv +
           (sv / 48.0) * ((sv * sv + 10.0) * w - a * a * a);
}

double cumulant_gf_derivative(Tilt s, int order, Side side) {
    if (order < 1 || order > 4)
        throw std::invalid_argument("derivative order must be in 1..4");
    const double sv = s.value();
    if (sv == 0.0 && order == 4 && side == Side::automatic)
        throw std::invalid_argument(
            "J'''' is discontinuous at s = 0; an explicit side is required");

    const double sg = branch_sign(sv, side);
    const double w = std::sqrt(sv * sv + 4.0);
    switch (order) {
        case 1: // x(s)
            return (w * w * w - 6.0 * sv - sg * sv * sv * sv) / 12.0;
        case 2: // x'(s)
            return (sv * w - 2.0 - sg * sv * sv) / 4.0;
        case 3: // x''(s)
            return ((sv * sv + 2.0) / w - sg * sv) / 2.0;
        case 4: // x'''(s); the sign term gives the jump of 1 at s = 0
            return (sv * (sv * sv + 6.0) / (w * w * w) - sg) / 2.0;
    }
    return 0.0; // unreachable
}

double minimal_energy(Tilt s, double abs_tol) {
    const EquilibriumMeasure mu = support_radii(s);
    const double R0 = mu.outer_radius();
    const double potential_avg = integrate_or_throw(
        [&](double r) { return mu.radial_marginal(r) * tilted_potential(s, r); },
        mu.inner_radius(), R0, abs_tol, 1e-13);
    return 0.5 * (potential_avg + tilted_potential(s, R0) - std::log(R0));
}

double tilt_inverse(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("tilt_inverse requires x > 0");

    const double tol = 1e-12 * std::max(1.0, x);
    const double x0 = 2.0 / 3.0;

    // x(s) is strictly decreasing: s < 0 iff x > 2/3.
    // Asymptotics: x(s) ~ -s for s -> -inf, x(s) ~ 1/(2s) for s -> +inf.
    double lo, hi; // bracket with x(lo) > x > x(hi)
    if (x == x0) return 0.0;
    if (x > x0) {
        hi = 0.0;
        lo = -(x + 1.0);
        while (mean_displacement(Tilt(lo)) < x) lo *= 2.0;
    } else {
        lo = 0.0;
        hi = std::max(1.0, 1.0 / (2.0 * x));
        while (mean_displacement(Tilt(hi)) > x) hi *= 2.0;
    }

    // Safeguarded Newton on f(s) = x(s) - x with bisection fallback.
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = mean_displacement(Tilt(s)) - x;
        if (std::fabs(f) <= tol) return s;
        if (f > 0.0)
            lo = s; // x(s) still above target: root is to the right
        else
            hi = s;
        const double fp = cumulant_gf_derivative(Tilt(s), 2); // x'(s) < 0
        double next = s - f / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
    }
    return s; // bracket width is below double resolution by now
}

double rate_function(double x, double abs_tol) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("rate_function requires x > 0");
    const double x0 = 2.0 / 3.0;
    if (x == x0) return 0.0;
    return -integrate_or_throw([](double xp) { return tilt_inverse(xp); },
                               x0, x, abs_tol, 1e-12, 4000);
}

TailExponent tail_exponent(double x, TailRegime regime) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("tail_exponent requires x > 0");
    const double x0 = 2.0 / 3.0;
    TailExponent out{};
    switch (regime) {
        case TailRegime::small_x:
            out.log_prefactor_coeff = 0.5;
            out.gaussian_coeff = 2.0 / 3.0;
            out.value = -0.5 * std::log(2.0 * x / 3.0) +
                        out.gaussian_coeff * (x * x - 4.0 / 9.0);
            break;
        case TailRegime::central:
            out.log_prefactor_coeff = 0.0;
            out.gaussian_coeff = 1.0;
            out.value = (x - x0) * (x - x0);
            break;
        case TailRegime::large_x:
            out.log_prefactor_coeff = 0.5;
            out.gaussian_coeff = 0.5;
            out.value = -0.5 * std::log(2.0 * x / 3.0) +
                        out.gaussian_coeff * (x * x - 4.0 / 9.0);
            break;
    }
    return out;
}

CumulantLeading leading_cumulants(double beta, int n) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    const double nn = static_cast<double>(n);
    return {beta, n, 2.0 / 3.0, 1.0 / (2.0 * beta * nn * nn),
            1.0 / (2.0 * beta * beta * nn * nn * nn * nn)};
}

namespace {

void require_strictly_increasing(const std::vector<double>& grid) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("grid must be strictly increasing");
}

} // namespace

LdpCurve tabulate_cgf(const std::vector<double>& s_grid) {
    require_strictly_increasing(s_grid);
    LdpCurve curve;
    curve.grid = s_grid;
    curve.tilt_values.reserve(s_grid.size());
    for (double sv : s_grid) {
        const Tilt s(sv);
        LdpPoint p;
        p.j = cumulant_gf(s);
        p.j1 = cumulant_gf_derivative(s, 1);
        p.j2 = cumulant_gf_derivative(s, 2);
        p.j3 = cumulant_gf_derivative(s, 3);
        p.j4_left = cumulant_gf_derivative(s, 4, Side::left);
        p.j4_right = cumulant_gf_derivative(s, 4, Side::right);
        p.x = mean_displacement(s);
        curve.tilt_values.push_back(p);
    }
    // discrete concavity of J
    for (std::size_t i = 1; i + 1 < curve.tilt_values.size(); ++i) {
        const double d2 = curve.tilt_values[i + 1].j -
                          2.0 * curve.tilt_values[i].j +
                          curve.tilt_values[i - 1].j;
        if (d2 > 1e-12)
            throw std::logic_error("tabulated J violates discrete concavity");
    }
    return curve;
}

LdpCurve tabulate_rate(const std::vector<double>& x_grid, double abs_tol) {
    require_strictly_increasing(x_grid);
    if (!x_grid.empty() && !(x_grid.front() > 0.0))
        throw std::invalid_argument("rate-function grid requires x > 0");
    LdpCurve curve;
    curve.grid = x_grid;
    curve.abs_tol = abs_tol;
    curve.rate_values.reserve(x_grid.size());
    for (double x : x_grid)
        curve.rate_values.push_back({rate_function(x, abs_tol), tilt_inverse(x)});
    return curve;
}

} // namespace ocp
