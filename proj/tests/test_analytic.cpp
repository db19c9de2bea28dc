#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ocp2d/analytic.hpp"
#include "ocp2d/quadrature.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace ocp;

namespace {

// Independent oracle route for J(s): excess energy of the equilibrium
// measure, J = H_s[mu*_s] - 3/8, with the measure integral done by a
// quadrature that does not share code with minimal_energy (plain Simpson
// refinement on the cubic integrand).
double excess_energy_oracle(double s) {
    const double r0 = std::max(0.0, -s);
    const double R0 = 0.5 * (std::sqrt(s * s + 4.0) - s);
    const auto f = [s](double r) {
        return (2.0 * r + s) * (0.5 * r * r + s * r);
    };
    // composite Simpson, 1<<14 panels: integrand is a cubic, so this is
    // far below 1e-13 absolute already at a handful of panels
    const int panels = 1 << 14;
    const double h = (R0 - r0) / panels;
    double acc = f(r0) + f(R0);
    for (int i = 1; i < panels; ++i)
        acc += f(r0 + i * h) * (i % 2 ? 4.0 : 2.0);
    const double integral = acc * h / 3.0;
    const double VR0 = 0.5 * R0 * R0 + s * R0;
    return 0.5 * (integral + VR0 - std::log(R0)) - 0.375;
}

double golden = (1.0 + std::sqrt(5.0)) / 2.0;

} // namespace

TEST_CASE("support radii match the closed form") {
    auto m0 = support_radii(Tilt(0.0));
    CHECK(m0.inner_radius() == 0.0);
    CHECK(m0.outer_radius() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(m0.is_annulus());

    auto mneg = support_radii(Tilt(-1.0));
    CHECK(mneg.inner_radius() == 1.0);
    CHECK(mneg.outer_radius() == doctest::Approx(golden).epsilon(1e-15));
    CHECK(mneg.is_annulus());

    auto mpos = support_radii(Tilt(1.0));
    CHECK(mpos.inner_radius() == 0.0);
    CHECK(mpos.outer_radius() == doctest::Approx(golden - 1.0).epsilon(1e-14));

    CHECK_THROWS_AS(Tilt(std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    CHECK_THROWS_AS(Tilt(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);

    // r0 < R0 for every s; topology flag flips exactly at 0
    for (double s = -6.0; s <= 6.0; s += 0.37) {
        auto m = support_radii(Tilt(s));
        CHECK(m.inner_radius() < m.outer_radius());
        CHECK(m.is_annulus() == (s < 0.0));
    }
}

TEST_CASE("radial density: circular law at s=0, zero outside support") {
    auto m = support_radii(Tilt(0.0));
    CHECK(m.radial_marginal(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.planar_density(0.5) == doctest::Approx(1.0 / M_PI).epsilon(1e-15));
    CHECK(m.radial_marginal(1.5) == 0.0);
    CHECK(m.planar_density(1.5) == 0.0);
    CHECK_THROWS_AS(m.radial_marginal(-0.1), std::invalid_argument);

    // normalization at s=-0.5: (R0^2 - r0^2) + s (R0 - r0) = 1
    auto mm = support_radii(Tilt(-0.5));
    const double r0 = mm.inner_radius(), R0 = mm.outer_radius();
    CHECK((R0 * R0 - r0 * r0) - 0.5 * (R0 - r0) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normalization of the radial marginal over a tilt grid") {
    for (double s = -5.0; s <= 5.0 + 1e-9; s += 0.25) {
        auto m = support_radii(Tilt(s));
        const double integral = integrate_or_throw(
            [&](double r) { return m.radial_marginal(r); }, m.inner_radius(),
            m.outer_radius(), 1e-13, 1e-13);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Gauss law holds on sampled (s, r) pairs") {
    // V_s'(r) r = int_{r0}^{r} (2r' + s) dr' inside the support
    int checked = 0;
    for (int i = 0; i < 10; ++i) {
        const double s = -4.0 + 0.9 * i;
        auto m = support_radii(Tilt(s));
        for (int j = 1; j <= 10; ++j) {
            const double r = m.inner_radius() +
                             (m.outer_radius() - m.inner_radius()) * j / 11.0;
            const double lhs = tilted_potential_derivative(Tilt(s), r) * r;
            const double r0 = m.inner_radius();
            const double rhs = (r * r - r0 * r0) + s * (r - r0);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            ++checked;
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("mean displacement: exact values and quadrature cross-check") {
    CHECK(mean_displacement(Tilt(0.0)) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const double x_m1 = (std::pow(5.0, 1.5) + 6.0 - 1.0) / 12.0;
    CHECK(mean_displacement(Tilt(-1.0)) == doctest::Approx(x_m1).epsilon(1e-15));
    CHECK(mean_displacement(Tilt(-1.0)) ==
          doctest::Approx(1.34836165729157904).epsilon(1e-14));

    // s = 10: tiny positive value; must equal the first moment of the
    // radial marginal by quadrature
    const double x10 = mean_displacement(Tilt(10.0));
    CHECK(x10 > 0.0);
    auto m = support_radii(Tilt(10.0));
    const double moment = integrate_or_throw(
        [&](double r) { return r * m.radial_marginal(r); }, m.inner_radius(),
        m.outer_radius(), 1e-14, 1e-13);
    CHECK(x10 == doctest::Approx(moment).epsilon(1e-10));

    // strictly decreasing
    double prev = mean_displacement(Tilt(-8.0));
    for (double s = -7.5; s <= 8.0; s += 0.5) {
        const double cur = mean_displacement(Tilt(s));
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("cumulant GF: normalization, oracle identity, asymmetry") {
    CHECK(cumulant_gf(Tilt(0.0)) == 0.0);

    // independent excess-energy oracle (frozen high-precision references in
    // comments; the oracle recomputes them here)
    CHECK(cumulant_gf(Tilt(1.0)) ==
          doctest::Approx(excess_energy_oracle(1.0)).epsilon(1e-10));
    CHECK(cumulant_gf(Tilt(1.0)) ==
          doctest::Approx(0.48220482404017020).epsilon(1e-14));
    CHECK(cumulant_gf(Tilt(-1.0)) ==
          doctest::Approx(excess_energy_oracle(-1.0)).epsilon(1e-10));
    CHECK(cumulant_gf(Tilt(-1.0)) ==
          doctest::Approx(-0.98220482404017020).epsilon(1e-14));
    CHECK(std::fabs(cumulant_gf(Tilt(-1.0))) >
          std::fabs(cumulant_gf(Tilt(1.0))));

    for (double s = -3.0; s <= 3.0 + 1e-9; s += 0.5) {
        if (s == 0.0) continue;
        CHECK(cumulant_gf(Tilt(s)) ==
              doctest::Approx(excess_energy_oracle(s)).epsilon(1e-10));
    }
}

TEST_CASE("minimal energy: H-stability value and identity with J") {
    CHECK(minimal_energy(Tilt(0.0)) == doctest::Approx(0.375).epsilon(1e-12));
    // V_0(R0) - log R0 = 1/2 at s = 0
    CHECK(tilted_potential(Tilt(0.0), 1.0) - std::log(1.0) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(minimal_energy(Tilt(-0.5)) - 0.375 ==
          doctest::Approx(cumulant_gf(Tilt(-0.5))).epsilon(1e-10));
}

TEST_CASE("derivatives of J: exact relations and the fourth-order jump") {
    CHECK(cumulant_gf_derivative(Tilt(0.0), 1) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    // J' == x with the same closed form
    for (double s = -3.0; s <= 3.0 + 1e-9; s += 0.25)
        CHECK(cumulant_gf_derivative(Tilt(s), 1) ==
              mean_displacement(Tilt(s)));

    // one-sided fourth derivatives at the transition
    const double left = cumulant_gf_derivative(Tilt(0.0), 4, Side::left);
    const double right = cumulant_gf_derivative(Tilt(0.0), 4, Side::right);
    CHECK(left == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(right == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(left - right == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(cumulant_gf_derivative(Tilt(0.0), 4), std::invalid_argument);
    CHECK_THROWS_AS(cumulant_gf_derivative(Tilt(0.5), 5), std::invalid_argument);
    CHECK_THROWS_AS(cumulant_gf_derivative(Tilt(0.5), 0), std::invalid_argument);

    // orders 1..3 continuous at 0
    for (int order = 1; order <= 3; ++order)
        CHECK(cumulant_gf_derivative(Tilt(0.0), order, Side::left) ==
              doctest::Approx(
                  cumulant_gf_derivative(Tilt(0.0), order, Side::right))
                  .epsilon(1e-15));

    // finite differences of J as an oracle for J'' away from 0
    const double h = 1e-4;
    const double fd2 = (cumulant_gf(Tilt(1.0 + h)) - 2.0 * cumulant_gf(Tilt(1.0)) +
                        cumulant_gf(Tilt(1.0 - h))) /
                       (h * h);
    CHECK(cumulant_gf_derivative(Tilt(1.0), 2) ==
          doctest::Approx(fd2).epsilon(1e-6));

    // and for J' (centered, O(h^2))
    const double fd1 =
        (cumulant_gf(Tilt(1.0 + h)) - cumulant_gf(Tilt(1.0 - h))) / (2.0 * h);
    CHECK(cumulant_gf_derivative(Tilt(1.0), 1) ==
          doctest::Approx(fd1).epsilon(1e-7));

    // concavity of J away from 0
    for (double s = -4.0; s <= 4.0 + 1e-9; s += 0.2) {
        if (std::fabs(s) < 1e-12) continue;
        CHECK(cumulant_gf_derivative(Tilt(s), 2) < 0.0);
    }
}

TEST_CASE("tilt_inverse: exact points and round trips") {
    CHECK(tilt_inverse(2.0 / 3.0) == 0.0);
    // an 8-digit x(-1) can only pin s to ~1e-5; the exact inverse of the
    // rounded value is -0.99998793930898 (full precision below recovers -1)
    CHECK(tilt_inverse(1.3483519) == doctest::Approx(-1.0).epsilon(2e-5));
    CHECK(tilt_inverse(1.3483519) ==
          doctest::Approx(-0.999987939308975).epsilon(1e-10));
    CHECK(tilt_inverse(1.34836165729157904) ==
          doctest::Approx(-1.0).epsilon(1e-11));

    for (double s : {-3.0, -1.0, -0.1, 0.1, 1.0, 3.0}) {
        const double x = mean_displacement(Tilt(s));
        CHECK(tilt_inverse(x) == doctest::Approx(s).epsilon(1e-9));
    }

    // residual bound |x(s_out) - x| <= 1e-12 max(1, x)
    for (double x : {0.01, 0.3, 0.66, 0.7, 2.0, 25.0}) {
        const double s = tilt_inverse(x);
        CHECK(std::fabs(mean_displacement(Tilt(s)) - x) <=
              1e-12 * std::max(1.0, x));
    }

    CHECK_THROWS_AS(tilt_inverse(0.0), std::invalid_argument);
    CHECK_THROWS_AS(tilt_inverse(-1.0), std::invalid_argument);

    // strictly decreasing
    CHECK(tilt_inverse(0.5) > tilt_inverse(0.6));
    CHECK(tilt_inverse(1.0) > tilt_inverse(2.0));
}

TEST_CASE("rate function: anchor, Gaussian regime, duality") {
    CHECK(rate_function(2.0 / 3.0) == 0.0);
    CHECK_THROWS_AS(rate_function(0.0), std::invalid_argument);
    CHECK_THROWS_AS(rate_function(-0.5), std::invalid_argument);

    // near the minimum: Psi(2/3 + eps) ~ eps^2
    const double eps = 1e-3;
    const double near = rate_function(2.0 / 3.0 + eps);
    CHECK(near == doctest::Approx(eps * eps).epsilon(0.2));

    // frozen reference (duality route, 30-digit arithmetic)
    CHECK(rate_function(3.0) ==
          doctest::Approx(3.57130025858441489).epsilon(1e-9));

    // Legendre duality at x = 3
    const double s3 = tilt_inverse(3.0);
    CHECK(cumulant_gf(Tilt(s3)) - rate_function(3.0) ==
          doctest::Approx(s3 * 3.0).epsilon(1e-8));

    // nonnegativity and convexity on a grid
    std::vector<double> xs, psis;
    for (double x = 0.1; x <= 2.5 + 1e-9; x += 0.1) {
        xs.push_back(x);
        psis.push_back(rate_function(x));
        CHECK(psis.back() >= -1e-12);
    }
    for (std::size_t i = 1; i + 1 < xs.size(); ++i)
        CHECK(psis[i + 1] - 2.0 * psis[i] + psis[i - 1] >= -1e-8);
}

TEST_CASE("tail exponent forms") {
    CHECK(tail_exponent(2.0 / 3.0, TailRegime::central).value == 0.0);
    CHECK(tail_exponent(1.0, TailRegime::central).gaussian_coeff == 1.0);

    auto large = tail_exponent(10.0, TailRegime::large_x);
    CHECK(large.log_prefactor_coeff == 0.5);
    CHECK(large.gaussian_coeff == 0.5);
    // frozen: -0.5 log(20/3) + 0.5 (100 - 4/9)
    CHECK(large.value == doctest::Approx(48.8292177853348371).epsilon(1e-13));
    // the large-x form tracks the true rate function to ~0.7% at x=10
    CHECK(rate_function(10.0) == doctest::Approx(large.value).epsilon(0.02));

    auto small = tail_exponent(0.01, TailRegime::small_x);
    CHECK(small.gaussian_coeff == doctest::Approx(2.0 / 3.0));
    CHECK(small.value == doctest::Approx(2.20908801741849825).epsilon(1e-13));
    // known offset of the printed small-x form: the exact rate function at
    // x = 0.01 is 1.83107816715891242 (constant term differs by
    // (1/2)log 3 - 8/27 + 1/8 ~ 0.378), i.e. ~17% relative at this x
    CHECK(rate_function(0.01) ==
          doctest::Approx(1.83107816715891242).epsilon(1e-8));
}

TEST_CASE("leading cumulants of Delta_N") {
    auto c = leading_cumulants(2.0, 1);
    CHECK(c.kappa1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c.kappa2 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(c.kappa3 == doctest::Approx(0.125).epsilon(1e-15));

    auto c2 = leading_cumulants(1.0, 10);
    CHECK(c2.kappa2 == doctest::Approx(1.0 / 200.0).epsilon(1e-15));
    CHECK(c2.kappa3 == doctest::Approx(1.0 / 20000.0).epsilon(1e-15));

    // kappa1 independent of both parameters
    CHECK(leading_cumulants(0.5, 3).kappa1 == leading_cumulants(7.0, 99).kappa1);

    CHECK_THROWS_AS(leading_cumulants(0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(leading_cumulants(1.0, 0), std::invalid_argument);
}

TEST_CASE("duality J(s) - Psi(x(s)) = s x(s) over the tilt grid") {
    for (double s = -3.0; s <= 3.0 + 1e-9; s += 0.25) {
        const double x = mean_displacement(Tilt(s));
        const double residual =
            cumulant_gf(Tilt(s)) - rate_function(x) - s * x;
        CHECK(std::fabs(residual) <= 1e-8);
    }
}

TEST_CASE("tabulated curves carry the advertised structure") {
    std::vector<double> sgrid;
    for (int i = -30; i <= 30; ++i) sgrid.push_back(0.1 * i);
    auto curve = tabulate_cgf(sgrid);
    REQUIRE(curve.tilt_values.size() == sgrid.size());
    CHECK(curve.tilt_values[30].j == 0.0); // s = 0 row

    std::vector<double> bad = {0.0, 0.0};
    CHECK_THROWS_AS(tabulate_cgf(bad), std::invalid_argument);

    std::vector<double> xgrid;
    for (int i = 1; i <= 30; ++i) xgrid.push_back(0.1 * i);
    auto rate = tabulate_rate(xgrid);
    REQUIRE(rate.rate_values.size() == xgrid.size());
    // minimum of Psi at the grid point nearest 2/3
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < rate.rate_values.size(); ++i)
        if (rate.rate_values[i].psi < rate.rate_values[argmin].psi) argmin = i;
    CHECK(xgrid[argmin] == doctest::Approx(0.7));
}
