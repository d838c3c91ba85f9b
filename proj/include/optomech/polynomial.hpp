#pragma once

// Closed-form real roots of low-degree polynomials and complex roots of monic
// quartics. Both solvers rescale the variable so the normalized coefficients
// are O(1) and then Newton-polish every root on the original polynomial.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "optomech/error.hpp"

namespace optomech {

/// a x^3 + b x^2 + c x + d.
struct CubicCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    double operator()(double x) const { return ((a * x + b) * x + c) * x + d; }
    double derivative(double x) const { return (3.0 * a * x + 2.0 * b) * x + c; }

    /// Largest term magnitude at x; the natural scale for residual checks.
    double term_scale(double x) const {
        const double ax = std::abs(x);
        return std::max({std::abs(a) * ax * ax * ax, std::abs(b) * ax * ax, std::abs(c) * ax, std::abs(d)});
    }

    double relative_residual(double x) const {
        const double s = term_scale(x);
        return s > 0.0 ? std::abs((*this)(x)) / s : 0.0;
    }
};

namespace detail {

inline double polish_cubic_root(const CubicCoefficients& p, double x) {
    double fx = p(x);
    for (int it = 0; it < 8 && fx != 0.0; ++it) {
        const double dfx = p.derivative(x);
        if (dfx == 0.0) break;
        const double next = x - fx / dfx;
        const double fnext = p(next);
        if (!(std::abs(fnext) < std::abs(fx))) break;
        x = next;
        fx = fnext;
    }
    return x;
}

inline std::vector<double> distinct_sorted(std::vector<double> roots) {
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(r - out.back()) <= 1e-12 * std::max(std::abs(r), std::abs(out.back())))
            continue;
        out.push_back(r);
    }
    return out;
}

inline std::vector<double> real_roots_quadratic(double a, double b, double c) {
    if (a == 0.0) {
        if (b == 0.0) return {};
        return {-c / b};
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    if (disc == 0.0) return {-b / (2.0 * a)};
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> r{q / a};
    if (q != 0.0) r.push_back(c / q);
    else r.push_back(0.0);
    return distinct_sorted(r);
}

} // namespace detail

/// All distinct real roots in ascending order. A vanishing leading coefficient
/// falls through to the quadratic or linear case.
inline std::vector<double> real_roots_cubic(const CubicCoefficients& p) {
    if (p.a == 0.0 && p.b == 0.0 && p.c == 0.0)
        throw Error(ErrorCode::IndeterminateEquation, "cubic has no x-dependent terms");
    if (p.a == 0.0) {
        auto r = detail::real_roots_quadratic(p.b, p.c, p.d);
        for (double& x : r) x = detail::polish_cubic_root(p, x);
        return detail::distinct_sorted(r);
    }

    const double B = p.b / p.a;
    const double C = p.c / p.a;
    const double D = p.d / p.a;
    // x = s y brings the monic coefficients to O(1).
    const double s = std::max({std::abs(B), std::sqrt(std::abs(C)), std::cbrt(std::abs(D))});
    if (s == 0.0) return {0.0};
    const double b1 = B / s;
    const double c1 = C / (s * s);
    const double d1 = D / (s * s * s);

    const double Q = (3.0 * c1 - b1 * b1) / 9.0;
    const double R = (9.0 * b1 * c1 - 27.0 * d1 - 2.0 * b1 * b1 * b1) / 54.0;
    const double disc = Q * Q * Q + R * R;

    std::vector<double> y;
    if (disc < 0.0) {
        const double sq = std::sqrt(-Q);
        const double theta = std::acos(std::clamp(R / (sq * sq * sq), -1.0, 1.0));
        for (int k = 0; k < 3; ++k)
            y.push_back(2.0 * sq * std::cos((theta + 2.0 * std::numbers::pi * k) / 3.0) - b1 / 3.0);
    } else {
        const double S = std::cbrt(R + std::copysign(std::sqrt(disc), R));
        const double T = S != 0.0 ? -Q / S : 0.0;
        y.push_back(S + T - b1 / 3.0);
        if (disc == 0.0 && S != 0.0) y.push_back(-0.5 * (S + T) - b1 / 3.0);
    }

    std::vector<double> roots;
    for (double yi : y) roots.push_back(detail::polish_cubic_root(p, s * yi));
    return detail::distinct_sorted(roots);
}

/// Monic quartic s^4 + c[3] s^3 + c[2] s^2 + c[1] s + c[0]; stored low order first.
struct Quartic {
    std::array<double, 4> c{};

    template <class T>
    T operator()(T s) const {
        return (((s + c[3]) * s + c[2]) * s + c[1]) * s + c[0];
    }
    template <class T>
    T derivative(T s) const {
        return ((4.0 * s + 3.0 * c[3]) * s + 2.0 * c[2]) * s + c[1];
    }
};

/// Four complex roots of a monic quartic by Ferrari's method (resolvent cubic),
/// each polished by complex Newton iteration.
inline std::array<std::complex<double>, 4> quartic_roots(const Quartic& q) {
    using cplx = std::complex<double>;
    const double sc = std::max({std::abs(q.c[3]), std::sqrt(std::abs(q.c[2])), std::cbrt(std::abs(q.c[1])),
                                std::sqrt(std::sqrt(std::abs(q.c[0])))});
    if (sc == 0.0) return {cplx{}, cplx{}, cplx{}, cplx{}};

    const double A = q.c[3] / sc;
    const double B = q.c[2] / (sc * sc);
    const double C = q.c[1] / (sc * sc * sc);
    const double D = q.c[0] / (sc * sc * sc * sc);

    // t = y - A/4 removes the cubic term: y^4 + P y^2 + Qc y + R = 0.
    const double P = B - 3.0 * A * A / 8.0;
    const double Qc = C - A * B / 2.0 + A * A * A / 8.0;
    const double R = D - A * C / 4.0 + A * A * B / 16.0 - 3.0 * A * A * A * A / 256.0;

    std::array<cplx, 4> y{};
    auto quad = [](cplx b, cplx c) {
        const cplx disc = std::sqrt(b * b - 4.0 * c);
        const cplx qq = -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
        if (qq == cplx{}) return std::array<cplx, 2>{cplx{}, cplx{}};
        return std::array<cplx, 2>{qq, c / qq};
    };

    const std::vector<double> m_roots = real_roots_cubic({8.0, 8.0 * P, 2.0 * P * P - 8.0 * R, -Qc * Qc});
    const double m = m_roots.empty() ? 0.0 : m_roots.back();
    if (m > 0.0 && std::abs(Qc) > 0.0) {
        const double w = std::sqrt(2.0 * m);
        const auto r1 = quad(cplx{w}, cplx{P / 2.0 + m - Qc / (2.0 * w)});
        const auto r2 = quad(cplx{-w}, cplx{P / 2.0 + m + Qc / (2.0 * w)});
        y = {r1[0], r1[1], r2[0], r2[1]};
    } else {
        // Biquadratic: y^4 + P y^2 + R.
        const auto z = quad(cplx{P}, cplx{R});
        y = {std::sqrt(z[0]), -std::sqrt(z[0]), std::sqrt(z[1]), -std::sqrt(z[1])};
    }

    std::array<cplx, 4> roots{};
    for (int i = 0; i < 4; ++i) {
        cplx s = (y[i] - A / 4.0) * sc;
        cplx f = q(s);
        for (int it = 0; it < 8 && f != cplx{}; ++it) {
            const cplx df = q.derivative(s);
            if (df == cplx{}) break;
            const cplx next = s - f / df;
            const cplx fnext = q(next);
            if (!(std::abs(fnext) < std::abs(f))) break;
            s = next;
            f = fnext;
        }
        roots[i] = s;
    }
    return roots;
}

} // namespace optomech
