#include "ocp2d/exact_beta2.hpp"

#include "ocp2d/quadrature.hpp"
#include "ocp2d/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ocp {

namespace {

void check_factor_args(int ell, int n) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    if (ell < 1 || ell > n) throw std::invalid_argument("ell must be in 1..N");
}

} // namespace

double log_laplace_factor(int ell, int n, double s) {
    check_factor_args(ell, n);
    if (!std::isfinite(s)) throw std::invalid_argument("s must be finite");
    if (s == 0.0) return 0.0;

    // After t = u^2 the normalized integral is
    //   2 int_0^inf u^{2l-1} e^{-u^2 - b u} du / Gamma(l),  b = 2 s sqrt(N).
    // The log-integrand g(u) = (2l-1) log u - u^2 - b u is strictly concave
    // with its maximum at the positive root of 2u^2 + b u - (2l-1) = 0.
    const double b = 2.0 * s * std::sqrt(static_cast<double>(n));
    const double p = 2.0 * ell - 1.0;
    const double ustar = (-b + std::sqrt(b * b + 8.0 * p)) / 4.0;
    const double curvature = p / (ustar * ustar) + 2.0; // -g''(u*)
    const double width = 1.0 / std::sqrt(curvature);

    const auto g = [&](double u) { return p * std::log(u) - u * u - b * u; };
    const double peak = g(ustar);
    const auto integrand = [&](double u) {
        return u > 0.0 ? std::exp(g(u) - peak) : 0.0;
    };

    // Window around the peak; concavity makes the tails at least Gaussian,
    // but for small l / large positive s the decay scale is 1/b, so extend
    // until the integrand is truly negligible at both edges.
    double lo = std::max(0.0, ustar - 10.0 * width);
    double hi = ustar + 10.0 * width;
    while (integrand(hi) > 1e-18) hi = ustar + 2.0 * (hi - ustar);
    while (lo > 0.0 && integrand(lo) > 1e-18)
        lo = std::max(0.0, ustar - 2.0 * (ustar - lo));

    const double integral =
        integrate_or_throw(integrand, lo, hi, 1e-13 * width, 1e-11, 4000);
    return peak + std::log(2.0 * integral) - std::lgamma(static_cast<double>(ell));
}

FactorIntegral laplace_factor(int ell, int n, double s) {
    return {ell, n, s, log_laplace_factor(ell, n, s)};
}

double scaled_log_laplace(int n, double s) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    CompensatedSum acc;
    for (int ell = 1; ell <= n; ++ell) acc.add(log_laplace_factor(ell, n, s));
    const double nn = static_cast<double>(n);
    return -acc.value() / (2.0 * nn * nn);
}

double xi_moment(int k, int m) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (m < 0) throw std::invalid_argument("m must be >= 0");
    if (m == 0) return 1.0;
    const double kk = static_cast<double>(k);
    return std::exp(std::lgamma(kk + 0.5 * m) - std::lgamma(kk));
}

namespace {

// Gamma(k + 1/2)/Gamma(k) by product recurrence in extended precision;
// the lgamma route is too noisy for the cumulant cancellations below.
long double half_integer_gamma_ratio(int k) {
    long double g = 0.886226925452758013649083741670572L; // Gamma(3/2)
    for (int j = 1; j < k; ++j)
        g *= (static_cast<long double>(j) + 0.5L) / static_cast<long double>(j);
    return g;
}

} // namespace

XiCumulants xi_cumulants_raw(int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const long double kk = static_cast<long double>(k);
    const long double m1 = half_integer_gamma_ratio(k);
    const long double m2 = kk;
    const long double m3 = (kk + 0.5L) * m1;
    const long double m4 = kk * (kk + 1.0L);

    XiCumulants c;
    c.k = k;
    c.kappa1 = static_cast<double>(m1);
    c.kappa2 = static_cast<double>(m2 - m1 * m1);
    c.kappa3 = static_cast<double>(m3 - 3.0L * m1 * m2 + 2.0L * m1 * m1 * m1);
    c.kappa4 = static_cast<double>(m4 - 4.0L * m1 * m3 - 3.0L * m2 * m2 +
                                   12.0L * m1 * m1 * m2 -
                                   6.0L * m1 * m1 * m1 * m1);
    return c;
}

XiCumulants xi_cumulants_asymptotic(int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    // Stirling-series expansions in u = 1/k of
    //   g = Gamma(k+1/2)/Gamma(k), delta = (k - g^2) - 1/4,
    // and of the cumulants themselves; the kappa4 series starts at u^2,
    // which is exactly the order lost to cancellation in the raw path.
    const double u = 1.0 / static_cast<double>(k);
    const double rk = std::sqrt(static_cast<double>(k));

    const double g_over =
        1.0 + u * (-1.0 / 8 +
              u * (1.0 / 128 +
              u * (5.0 / 1024 +
              u * (-21.0 / 32768 +
              u * (-399.0 / 262144 + u * (869.0 / 4194304))))));
    const double delta =
        u * (-1.0 / 32 +
        u * (-1.0 / 128 +
        u * (5.0 / 2048 +
        u * (23.0 / 8192 +
        u * (-53.0 / 65536 + u * (-593.0 / 262144))))));
    const double k3_over =
        u * (1.0 / 16 +
        u * (1.0 / 128 +
        u * (-13.0 / 2048 +
        u * (-75.0 / 16384 +
        u * (1215.0 / 524288 + u * (17403.0 / 4194304))))));
    const double k4 =
        u * u * (3.0 / 256 +
        u * (3.0 / 512 +
        u * (-45.0 / 8192 +
        u * (-57.0 / 8192 +
        u * (4875.0 / 1048576 + u * (24129.0 / 2097152))))));

    XiCumulants c;
    c.k = k;
    c.kappa1 = rk * g_over;
    c.kappa2 = 0.25 + delta;
    c.kappa3 = rk * k3_over;
    c.kappa4 = k4;
    c.asymptotic_path = true;
    return c;
}

XiCumulants xi_cumulants(int k) {
    return k > kXiCumulantAsymptoticThreshold ? xi_cumulants_asymptotic(k)
                                              : xi_cumulants_raw(k);
}

CumulantTable delta_cumulant_table(int n) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    CompensatedSum acc[4];
    bool guarded = false;
    for (int k = 1; k <= n; ++k) {
        const XiCumulants c = xi_cumulants(k);
        acc[0].add(c.kappa1);
        acc[1].add(c.kappa2);
        acc[2].add(c.kappa3);
        acc[3].add(c.kappa4);
        guarded |= c.asymptotic_path;
    }
    CumulantTable t;
    t.n = n;
    t.cancellation_guard = guarded;
    const double nn = static_cast<double>(n);
    for (int m = 0; m < 4; ++m) {
        t.kappa[m] = acc[m].value() * std::pow(nn, -1.5 * (m + 1));
        t.rescaled[m] = t.kappa[m] * std::pow(nn, 2.0 * m);
    }
    return t;
}

double delta_n6_kappa4_float64_raw(int n) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double m1 = xi_moment(k, 1);
        const double m2 = static_cast<double>(k);
        const double m3 = xi_moment(k, 3);
        const double m4 = static_cast<double>(k) * (k + 1.0);
        sum += m4 - 4.0 * m1 * m3 - 3.0 * m2 * m2 + 12.0 * m1 * m1 * m2 -
               6.0 * m1 * m1 * m1 * m1;
    }
    return sum;
}

RadialSampleSet sample_radii(int n, CounterRng& rng) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    RadialSampleSet out;
    out.n = n;
    out.seed = rng.seed();
    out.stream = rng.stream();
    out.radii.reserve(n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 1; k <= n; ++k)
        out.radii.push_back(std::sqrt(rng.gamma(static_cast<double>(k))) *
                            inv_sqrt_n);
    return out;
}

} // namespace ocp
