#include "ocp2d/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace ocp {

namespace {

// QUADPACK dqk15 abscissae/weights (positive half; node 7 is the midpoint).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);

    double res_k = kWgk[7] * fv[7];
    double res_g = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        res_k += kWgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) res_g += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    res_k *= h;
    res_g *= h;

    // QUADPACK-style error damping: sharper than |K - G| once the
    // interval is resolved, conservative otherwise.
    double res_abs = 0.0;
    res_abs += kWgk[7] * std::fabs(fv[7]);
    for (int i = 0; i < 7; ++i)
        res_abs += kWgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
    res_abs *= std::fabs(h);

    double err = std::fabs(res_k - res_g);
    if (res_abs > 0.0 && err > 0.0)
        err = res_abs * std::min(1.0, std::pow(200.0 * err / res_abs, 1.5));
    return {a, b, res_k, err};
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f,
                              double a, double b,
                              double abs_tol, double rel_tol,
                              int max_intervals) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::priority_queue<Segment> heap;
    heap.push(kronrod15(f, a, b));
    double total_value = heap.top().value;
    double total_error = heap.top().error;
    int n = 1;

    while (n < max_intervals) {
        double tol = std::max(abs_tol, rel_tol * std::fabs(total_value));
        if (total_error <= tol) break;

        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment left = kronrod15(f, worst.a, mid);
        Segment right = kronrod15(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n;
    }

    out.value = total_value;
    out.error_estimate = total_error;
    out.intervals = n;
    out.converged =
        total_error <= std::max(abs_tol, rel_tol * std::fabs(total_value));
    return out;
}

double integrate_or_throw(const std::function<double(double)>& f,
                          double a, double b,
                          double abs_tol, double rel_tol,
                          int max_intervals) {
    QuadResult r = integrate_adaptive(f, a, b, abs_tol, rel_tol, max_intervals);
    if (!r.converged) {
        throw QuadratureError(
            "adaptive quadrature did not converge (achieved error " +
                std::to_string(r.error_estimate) + ")",
            r.value, r.error_estimate);
    }
    return r.value;
}

} // namespace ocp
