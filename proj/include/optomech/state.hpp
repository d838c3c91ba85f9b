#pragma once

#include <complex>

namespace optomech {

/// Classical operating point of the mean-field equations. Mechanical
/// quadratures are in zero-point units; the cavity amplitude in sqrt(photons).
struct SteadyState {
    double x_s = 0.0;
    double p_s = 0.0;
    std::complex<double> a_s{};
    double n_s = 0.0;
    double delta_a = 0.0;      // bare detuning, rad/s
    double delta_s = 0.0;      // delta_a - g_omega x_s
    double kappa_s = 0.0;      // kappa_a - g_kappa x_s
    double gamma_big_s = 0.0;  // sqrt(2 kappa_a) - g_kappa x_s / sqrt(2 kappa_a)
    double drive_phase = 0.0;  // theta used to evaluate a_s
};

} // namespace optomech
