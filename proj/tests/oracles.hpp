// Shared independent oracles for the test suites. These deliberately avoid
// the library's own computational paths.
#pragma once
#include "kerrosc/math/numerics.hpp"
#include <Eigen/Dense>
#include "kerrosc/params.hpp"
#include <complex>
#include <random>

namespace oracles {

using cplx = std::complex<double>;

/// Number of real roots of alpha x^3 - delta x + f = 0 by the cubic
/// discriminant (depressed cubic p x^3 + q x + r).
inline int cubic_real_root_count(double alpha, double delta, double f)
{
    double disc = 4 * alpha * delta * delta * delta - 27 * alpha * alpha * f * f;
    return disc > 0 ? 3 : 1;
}

/// Exact stationary state of the damped driven linear oscillator (alpha = 0):
/// displaced thermal state with <a> = f (delta - i gamma/2)/(delta^2+gamma^2/4).
struct LinearOscillator {
    cplx mean_a;
    double mean_n;
};
inline LinearOscillator linear_oscillator_steady(double delta, double f, double gamma, double nth)
{
    LinearOscillator lo;
    lo.mean_a = f * cplx(delta, -gamma / 2) / (delta * delta + gamma * gamma / 4);
    lo.mean_n = std::norm(lo.mean_a) + nth;
    return lo;
}

/// Small-oscillation frequency at a real stationary point from the Hessian of
/// the classical Hamiltonian (independent re-derivation).
inline double hessian_frequency(const kerrosc::ModelParams& p, double x)
{
    double I = x * x;
    double G = -p.delta + p.alpha * I + p.potential_deriv(I);
    double Gp = p.alpha + p.potential_second(I);
    double hxx = 2 * G + 4 * I * Gp, hyy = 2 * G;
    return 0.5 * std::sqrt(hxx * hyy);
}

/// Mean quasienergy drift rate of the dissipative (noise-free) classical flow
/// da/dt = -i dH/da* - (gamma/2) a, measured over one orbit by direct Euler
/// integration with a tiny step (the Langevin-free drift oracle).
inline double dissipative_drift_rate(const kerrosc::ModelParams& p, cplx a0, double period,
                                     double gamma)
{
    const int steps = 200000;
    double dt = period / steps;
    cplx a = a0;
    auto grad = [&](cplx z) {
        double I = std::norm(z);
        return (-p.delta + p.alpha * I + p.potential_deriv(I)) * z + p.drive;
    };
    auto ham = [&](cplx z) {
        double I = std::norm(z);
        return -p.delta * I + 0.5 * p.alpha * I * I + p.potential(I) + 2 * p.drive * z.real();
    };
    double e0 = ham(a);
    for (int i = 0; i < steps; i++) {
        // Heun step for the dissipative flow
        cplx k1 = cplx(0, -1) * grad(a) - 0.5 * gamma * a;
        cplx mid = a + dt * k1;
        cplx k2 = cplx(0, -1) * grad(mid) - 0.5 * gamma * mid;
        a += 0.5 * dt * (k1 + k2);
    }
    return (ham(a) - e0) / period;
}

/// Deterministic random Hermitian matrix with unit trace (a valid mixed-state
/// density matrix candidate up to positivity).
inline Eigen::MatrixXcd random_hermitian_unit_trace(int dim, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd(0, 1);
    Eigen::MatrixXcd m(dim, dim);
    for (int i = 0; i < dim; i++)
        for (int j = 0; j < dim; j++)
            m(i, j) = cplx(nd(gen), nd(gen));
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    h -= Eigen::MatrixXcd::Identity(dim, dim) * (h.trace() / (double)dim - 1.0 / dim);
    return h;
}

} // namespace oracles
