#pragma once

// Stationary covariance of the linearized dynamics and two-mode Gaussian
// entanglement (logarithmic negativity). Quadrature convention: vacuum
// variance 1/2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <string>

#include <Eigen/Dense>

#include "optomech/error.hpp"
#include "optomech/linear_model.hpp"

namespace optomech {

inline constexpr double kLyapunovResidualTolerance = 1e-9;
inline constexpr double kPhysicalityTolerance = 1e-6;
inline constexpr double kUnphysicalTolerance = 1e-10;

inline double max_norm(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

/// max |A V + V A^T + D| relative to max |D|.
inline double lyapunov_residual(const Mat4& A, const Mat4& V, const Mat4& D) {
    const double scale = max_norm(D);
    const double r = max_norm(A * V + V * A.transpose() + D);
    return scale > 0.0 ? r / scale : r;
}

/// Solves A V + V A^T = -D by Gaussian elimination with partial pivoting on
/// the 16x16 vectorized system (I (x) A + A (x) I) vec V = -vec D, followed by
/// iterative refinement and symmetrization.
inline Mat4 solve_lyapunov(const Mat4& A, const Mat4& D) {
    if (!spectral_stable(A).stable)
        throw Error(ErrorCode::StabilityPrecondition, "drift matrix is not Hurwitz; no stationary covariance");

    using Mat16 = Eigen::Matrix<double, 16, 16>;
    using Vec16 = Eigen::Matrix<double, 16, 1>;
    Mat16 M = Mat16::Zero();
    // Column-major vec: vec(A V) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V.
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                M(4 * j + i, 4 * j + k) += A(i, k);
                M(4 * j + i, 4 * k + i) += A(j, k);
            }
    const Eigen::PartialPivLU<Mat16> lu(M);
    if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon()))
        throw Error(ErrorCode::Conditioning, "Lyapunov system is numerically singular (marginal stability)");

    const Vec16 rhs = -Eigen::Map<const Vec16>(D.data());
    Vec16 v = lu.solve(rhs);
    for (int it = 0; it < 2; ++it) v += lu.solve(rhs - M * v);

    Mat4 V = Eigen::Map<const Mat4>(v.data());
    return 0.5 * (V + V.transpose());
}

struct SymplecticInvariants {
    double det_m = 0.0;  // mechanical block
    double det_o = 0.0;  // optical block
    double det_c = 0.0;  // correlation block
    double det_v = 0.0;
    double sigma = 0.0;  // det_m + det_o - 2 det_c
};

inline SymplecticInvariants symplectic_invariants(const Mat4& V) {
    SymplecticInvariants s;
    s.det_m = V.block<2, 2>(0, 0).determinant();
    s.det_o = V.block<2, 2>(2, 2).determinant();
    s.det_c = V.block<2, 2>(0, 2).determinant();
    s.det_v = V.determinant();
    s.sigma = s.det_m + s.det_o - 2.0 * s.det_c;
    return s;
}

namespace detail {

/// Smaller and larger roots nu^2 of nu^4 - s nu^2 + det = 0, with the small
/// one taken from the product of roots to avoid cancellation.
inline std::pair<double, double> symplectic_pair(double s, double det, double scale_tol, const char* what) {
    double disc = s * s - 4.0 * det;
    if (disc < 0.0) {
        if (disc < -scale_tol * s * s)
            throw Error(ErrorCode::UnphysicalCovariance, std::string(what) + ": invariant discriminant is negative (sigma^2 = " +
                                                              std::to_string(s * s) + ", 4 det V = " +
                                                              std::to_string(4.0 * det) + ")");
        disc = 0.0;
    }
    const double big = 0.5 * (s + std::sqrt(disc));
    const double small = big > 0.0 ? det / big : 0.0;
    return {std::sqrt(std::max(small, 0.0)), std::sqrt(std::max(big, 0.0))};
}

} // namespace detail

struct EntanglementReport {
    double sigma = 0.0;
    double eta_minus = 0.0;
    double log_negativity = 0.0;
    bool stable = true;
    double nu_minus = 0.0;  // symplectic eigenvalues of V itself
    double nu_plus = 0.0;

    bool entangled() const { return log_negativity > 0.0; }
};

/// E_N = max(0, -ln 2 eta_minus) with
/// eta_minus = 2^{-1/2} [Sigma - (Sigma^2 - 4 det V)^{1/2}]^{1/2}.
inline EntanglementReport logarithmic_negativity(const Mat4& V) {
    const SymplecticInvariants inv = symplectic_invariants(V);
    if (!(inv.det_v > 0.0))
        throw Error(ErrorCode::UnphysicalCovariance, "det V = " + std::to_string(inv.det_v) + " is not positive");

    EntanglementReport r;
    r.sigma = inv.sigma;
    // eta_minus^2 = (Sigma - sqrt(Sigma^2 - 4 det V)) / 2
    r.eta_minus = detail::symplectic_pair(inv.sigma, inv.det_v, kUnphysicalTolerance, "partial transpose").first;
    r.log_negativity = std::max(0.0, -std::log(2.0 * r.eta_minus));

    const double delta = inv.det_m + inv.det_o + 2.0 * inv.det_c;
    const auto [lo, hi] = detail::symplectic_pair(delta, inv.det_v, kUnphysicalTolerance, "covariance");
    r.nu_minus = lo;
    r.nu_plus = hi;
    return r;
}

struct PhysicalityReport {
    double nu_minus = 0.0;
    double nu_plus = 0.0;
    bool physical = false;
};

/// Uncertainty-principle gate: both symplectic eigenvalues >= 1/2 - 1e-6.
inline PhysicalityReport physicality_check(const Mat4& V) {
    const SymplecticInvariants inv = symplectic_invariants(V);
    const double delta = inv.det_m + inv.det_o + 2.0 * inv.det_c;
    double disc = std::max(delta * delta - 4.0 * inv.det_v, 0.0);
    const double big = 0.5 * (delta + std::sqrt(disc));
    const double small = big > 0.0 ? inv.det_v / big : 0.0;
    PhysicalityReport r;
    r.nu_minus = std::sqrt(std::max(small, 0.0));
    r.nu_plus = std::sqrt(std::max(big, 0.0));
    r.physical = r.nu_minus >= 0.5 - kPhysicalityTolerance && r.nu_plus >= 0.5 - kPhysicalityTolerance;
    return r;
}

} // namespace optomech
