#pragma once
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace kerrosc { namespace math {

using cplx = std::complex<double>;

/// Dormand-Prince 5(4) step with dense output, for 2-component states (planar flows).
/// The right-hand side is a functor state -> derivative (autonomous systems).
class Dopri5 {
public:
    using State = std::array<double, 2>;
    using Rhs = std::function<State(const State&)>;

    Dopri5(Rhs rhs, double rtol = 1e-12, double atol = 1e-14) :
        rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

    /// Initialize at (t0, y0); an initial step size is estimated from the derivative scale.
    void start(double t0, const State& y0);

    /// Advance one accepted step; returns false if the step size underflows.
    bool step();

    double t_begin() const { return t_prev_; }
    double t_end()   const { return t_; }
    const State& y() const { return y_; }

    /// Dense-output evaluation inside the last accepted step, theta in [0,1].
    State interpolate(double theta) const;

    /// Integrate exactly to t_target (must be >= current t).
    void integrate_to(double t_target);

    long n_steps() const { return n_steps_; }

private:
    Rhs rhs_;
    double rtol_, atol_;
    double t_ = 0, t_prev_ = 0, h_ = 0;
    State y_{}, y_prev_{};
    State k1_{};               // FSAL derivative at current point
    std::array<State, 5> rcont_{};  // dense-output coefficients
    long n_steps_ = 0;

    bool try_step(double h, State& y_new, State k[7], double& err) const;
    void build_dense(const State k[7], double h);
};

/// Brent root finder on a sign-changing bracket.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-14, int max_iter = 200);

/// Adaptive Gauss quadrature: 30-point Gauss vs 61-point Kronrod-like refinement by bisection.
double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-11, int max_depth = 24);

/// Fixed-order Gauss-Legendre rule on [a,b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int order);

/// Monotonicity-preserving piecewise cubic interpolant (Fritsch-Carlson).
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const;
    double derivative(double xq) const;
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    /// Inverse for strictly monotone data; throws if not monotone.
    double inverse(double yq) const;
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, d_;
    std::size_t locate(double xq) const;
};

/// Vertex abscissa of the parabola through three points (x equally or unequally spaced).
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2);

/// In-place radix-2 FFT; size must be a power of two. inverse=true applies the
/// conjugate transform without the 1/N normalization.
void fft_pow2(std::vector<cplx>& data, bool inverse);

/// Cumulative trapezoid integral of samples y over nonuniform grid x; out[0] = 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& y);

/// Trapezoid integral over a nonuniform grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}} // namespace kerrosc::math
