#pragma once

#include <optional>
#include <vector>

namespace ocp {

// ===========================================================================
// Closed-form large-deviation objects for the mean radial displacement of the
// 2D one-component plasma in the confining potential V_s(r) = r^2/2 + s r.
//
// The scaled cumulant generating function
//
//   J(s) = (1/2) arsinh(s/2) - s^2/4 + (s/48) [ (s^2+10) sqrt(s^2+4) - |s|^3 ]
//
// is beta-independent, strictly concave, J(0)=0, and has a fourth-order
// singularity at s=0 (disk-to-annulus topology change of the equilibrium
// support). The rate function Psi is its Legendre-Fenchel conjugate.
// ===========================================================================

/// Laplace-conjugate tilt parameter. Any finite real value.
class Tilt {
public:
    explicit Tilt(double s);
    double value() const noexcept { return s_; }

private:
    double s_;
};

/// External potential V_s(r) = r^2/2 + s r and its radial derivative.
double tilted_potential(Tilt s, double r);
double tilted_potential_derivative(Tilt s, double r);

/// Equilibrium (mean-field) measure of the tilted gas: uniform background
/// charge on the annulus r0 <= r <= R0, with radial marginal 2r + s.
class EquilibriumMeasure {
public:
    double inner_radius() const noexcept { return r0_; }
    double outer_radius() const noexcept { return R0_; }
    Tilt tilt() const noexcept { return s_; }

    /// True if the support is an annulus (s < 0), false for a disk (s >= 0).
    bool is_annulus() const noexcept { return r0_ > 0.0; }

    /// Radial marginal (2r + s) 1_{r in [r0, R0]}; integrates to 1.
    double radial_marginal(double r) const;

    /// Two-dimensional density: marginal / (2 pi r), zero outside the support.
    double planar_density(double r) const;

private:
    friend EquilibriumMeasure support_radii(Tilt s);
    EquilibriumMeasure(double r0, double R0, Tilt s) : r0_(r0), R0_(R0), s_(s) {}
    double r0_, R0_;
    Tilt s_;
};

/// Support radii of the equilibrium measure:
///   r0 = max{0, -s},  R0 = (sqrt(s^2+4) - s)/2.
EquilibriumMeasure support_radii(Tilt s);

/// x(s) = [ (s^2+4)^{3/2} - 6 s - |s|^3 ] / 12, the typical mean displacement
/// of the tilted gas. Strictly decreasing, x(0) = 2/3, range (0, inf).
double mean_displacement(Tilt s);

/// The scaled cumulant generating function J(s). J(0) = 0, strictly concave.
double cumulant_gf(Tilt s);

/// Which one-sided branch to use for derivatives at the singular point s = 0.
enum class Side { left, right, automatic };

/// Piecewise-analytic derivatives of J, obtained by differentiating x(s)
/// with sign(s) frozen on each side (J' = x, J'' = x', ...). The fourth
/// derivative jumps at 0: J''''(0-) = +1/2, J''''(0+) = -1/2.
/// order must be in 1..4. At s = 0 with order = 4 an explicit side is
/// required; std::invalid_argument otherwise.
double cumulant_gf_derivative(Tilt s, int order, Side side = Side::automatic);

/// Mean-field energy of the equilibrium measure,
///   H_s[mu*_s] = (1/2) [ int dmu*_s V_s + V_s(R0) - log R0 ],
/// with the measure integral done by adaptive quadrature (abs_tol target).
/// The identity J(s) = H_s[mu*_s] - 3/8 provides an independent route to J.
double minimal_energy(Tilt s, double abs_tol = 1e-10);

/// Ground-state energy H_0[mu*_0] of the untilted gas (H-stability value).
inline constexpr double kGroundStateEnergy = 0.375;

/// Inverse of mean_displacement: the unique s with x(s) = x, for x > 0.
/// Bracketing plus safeguarded Newton; |x(s) - x| <= 1e-12 max(1, x).
double tilt_inverse(double x);

/// Rate function Psi(x) = -int_{2/3}^{x} s(x') dx' for x > 0, by adaptive
/// quadrature over tilt_inverse. Psi(2/3) = 0, convex, >= 0.
double rate_function(double x, double abs_tol = 1e-9);

enum class TailRegime { small_x, central, large_x };

/// Coefficients of the asymptotic forms of -(1/(beta N^2)) log P:
///   small/large x:  log_prefactor_coeff * (-log(2x/3))
///                   + gaussian_coeff * (x^2 - 4/9)
///   central:        gaussian_coeff * (x - 2/3)^2
struct TailExponent {
    double log_prefactor_coeff;
    double gaussian_coeff;
    double value; // the form evaluated at the requested x
};

TailExponent tail_exponent(double x, TailRegime regime);

/// Leading-order cumulants of Delta_N:
///   kappa1 = 2/3,  kappa2 = 1/(2 beta N^2),  kappa3 = 1/(2 beta^2 N^4).
struct CumulantLeading {
    double beta;
    int n;
    double kappa1;
    double kappa2;
    double kappa3;
};

CumulantLeading leading_cumulants(double beta, int n);

// ===========================================================================
// Tabulated curves
// ===========================================================================

struct LdpPoint {
    double j = 0.0;
    double j1 = 0.0;
    double j2 = 0.0;
    double j3 = 0.0;
    double j4_left = 0.0;
    double j4_right = 0.0;
    double x = 0.0;
};

struct RatePoint {
    double psi = 0.0;
    double s = 0.0;
};

/// Sampled curve over a strictly increasing grid, with the tolerances used.
/// For tilt-side curves the discrete concavity of J is checked on build.
struct LdpCurve {
    std::vector<double> grid;
    std::vector<LdpPoint> tilt_values;  // populated for a grid in s
    std::vector<RatePoint> rate_values; // populated for a grid in x
    double abs_tol = 0.0;
};

/// Tabulate J and its derivatives (and x) over a grid of tilt values.
LdpCurve tabulate_cgf(const std::vector<double>& s_grid);

/// Tabulate Psi (and the conjugate s) over a grid of x > 0 values.
LdpCurve tabulate_rate(const std::vector<double>& x_grid, double abs_tol = 1e-9);

} // namespace ocp
