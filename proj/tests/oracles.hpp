#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <array>
#include <cmath>
#include <complex>

#include "platoon/types.hpp"

namespace oracles {

/// Matrix exponential by argument scaling and a straight Taylor series
/// (independent of the Pade-based library routine).
template <typename Mat>
Mat expm_taylor(const Mat& a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Mat scaled = a * scale;
    Mat result = Mat::Identity();
    Mat term = Mat::Identity();
    for (int k = 1; k <= 40; ++k) {
        term = (term * scaled / static_cast<double>(k)).eval();
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-20) break;
    }
    for (int s = 0; s < squarings; ++s) {
        result = (result * result).eval();
    }
    return result;
}

/// Composite Simpson quadrature of integrand(theta) over [0, upper].
template <typename Mat, typename Fn>
Mat simpson(Fn&& integrand, double upper, int panels) {
    const double h = upper / (2 * panels);
    Mat sum = integrand(0.0) + integrand(upper);
    for (int k = 1; k < 2 * panels; ++k) {
        sum += integrand(k * h) * (k % 2 ? 4.0 : 2.0);
    }
    return sum * (h / 3.0);
}

/// Magnitudes of the roots of z^3 + b z^2 + c z + d, sorted descending.
/// One real root is isolated by bisection (refined by Newton), the rest come
/// from the deflated quadratic.
inline std::array<double, 3> cubic_root_magnitudes(double b, double c, double d) {
    auto poly = [&](double z) { return ((z + b) * z + c) * z + d; };
    double bound = 1.0 + std::max({std::abs(b), std::abs(c), std::abs(d)});
    double lo = -bound, hi = bound;
    if (poly(lo) > 0.0) {   // cubic is increasing at -inf; widen until signs differ
        while (poly(lo) > 0.0) lo *= 2.0;
    }
    while (poly(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * bound; ++it) {
        const double mid = 0.5 * (lo + hi);
        (poly(mid) < 0.0 ? lo : hi) = mid;
    }
    double root = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {  // Newton polish
        const double deriv = (3.0 * root + 2.0 * b) * root + c;
        if (deriv == 0.0) break;
        root -= poly(root) / deriv;
    }
    // deflate: z^3 + b z^2 + c z + d = (z - root)(z^2 + p z + q)
    const double p = b + root;
    const double q = c + root * p;
    const double disc = p * p - 4.0 * q;
    std::array<double, 3> mags;
    mags[0] = std::abs(root);
    if (disc >= 0.0) {
        mags[1] = std::abs(0.5 * (-p + std::sqrt(disc)));
        mags[2] = std::abs(0.5 * (-p - std::sqrt(disc)));
    } else {
        const double mag = std::sqrt(q);  // complex pair, |z|^2 = q
        mags[1] = mag;
        mags[2] = mag;
    }
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    return mags;
}

/// Classic fixed-step RK4 for the scalar lag dynamics (speed, accel) with a
/// held input; used to cross-check the closed-form plant step.
inline std::pair<double, double> rk4_lag_step(double speed, double accel, double input,
                                              double tau, double dt, int substeps) {
    const double h = dt / substeps;
    double v = speed, a = accel;
    auto da = [&](double ai) { return (input - ai) / tau; };
    for (int k = 0; k < substeps; ++k) {
        const double a1 = da(a);
        const double a2 = da(a + 0.5 * h * a1);
        const double a3 = da(a + 0.5 * h * a2);
        const double a4 = da(a + h * a3);
        const double v1 = a;
        const double v2 = a + 0.5 * h * a1;
        const double v3 = a + 0.5 * h * a2;
        const double v4 = a + h * a3;
        v += h / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
        a += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    }
    return {v, a};
}

}  // namespace oracles
