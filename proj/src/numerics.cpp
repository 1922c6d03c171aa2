#include "kerrosc/math/numerics.hpp"
#include "kerrosc/errors.hpp"
#include <algorithm>
#include <cassert>

namespace kerrosc { namespace math {

namespace {

// Dormand-Prince tableau
const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
const double a21 = 1.0 / 5;
const double a31 = 3.0 / 40, a32 = 9.0 / 40;
const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
             a65 = -5103.0 / 18656;
const double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
             a76 = 11.0 / 84;
const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
             e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output
const double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
             d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
             d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

inline Dopri5::State axpy(const Dopri5::State& y, double h,
                          std::initializer_list<std::pair<double, const Dopri5::State*>> terms)
{
    Dopri5::State r = y;
    for (const auto& [c, k] : terms) {
        r[0] += h * c * (*k)[0];
        r[1] += h * c * (*k)[1];
    }
    return r;
}

} // namespace

void Dopri5::start(double t0, const State& y0)
{
    t_ = t_prev_ = t0;
    y_ = y_prev_ = y0;
    k1_ = rhs_(y0);
    double ynorm = std::sqrt(y0[0] * y0[0] + y0[1] * y0[1]);
    double fnorm = std::sqrt(k1_[0] * k1_[0] + k1_[1] * k1_[1]);
    h_ = (fnorm > 0) ? 0.01 * std::max(ynorm, 1e-6) / fnorm : 1e-6;
    n_steps_ = 0;
}

bool Dopri5::try_step(double h, State& y_new, State k[7], double& err) const
{
    k[0] = k1_;
    k[1] = rhs_(axpy(y_, h, {{a21, &k[0]}}));
    k[2] = rhs_(axpy(y_, h, {{a31, &k[0]}, {a32, &k[1]}}));
    k[3] = rhs_(axpy(y_, h, {{a41, &k[0]}, {a42, &k[1]}, {a43, &k[2]}}));
    k[4] = rhs_(axpy(y_, h, {{a51, &k[0]}, {a52, &k[1]}, {a53, &k[2]}, {a54, &k[3]}}));
    k[5] = rhs_(axpy(y_, h, {{a61, &k[0]}, {a62, &k[1]}, {a63, &k[2]}, {a64, &k[3]}, {a65, &k[4]}}));
    y_new = axpy(y_, h, {{a71, &k[0]}, {a73, &k[2]}, {a74, &k[3]}, {a75, &k[4]}, {a76, &k[5]}});
    k[6] = rhs_(y_new);

    err = 0;
    for (int i = 0; i < 2; i++) {
        double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                        e7 * k[6][i]);
        double sc = atol_ + rtol_ * std::max(std::fabs(y_[i]), std::fabs(y_new[i]));
        err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / 2);
    return std::isfinite(err);
}

void Dopri5::build_dense(const State k[7], double h)
{
    for (int i = 0; i < 2; i++) {
        double dy = y_[i] - y_prev_[i];
        rcont_[0][i] = y_prev_[i];
        rcont_[1][i] = dy;
        rcont_[2][i] = h * k[0][i] - dy;
        rcont_[3][i] = dy - h * k[6][i] - rcont_[2][i];
        rcont_[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                            d6 * k[5][i] + d7 * k[6][i]);
    }
}

bool Dopri5::step()
{
    State y_new, k[7];
    for (;;) {
        if (!(h_ > 1e-300))
            return false;
        double err;
        if (!try_step(h_, y_new, k, err)) {
            h_ *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            t_prev_ = t_;
            y_prev_ = y_;
            t_ += h_;
            y_ = y_new;
            build_dense(k, h_);
            k1_ = k[6];  // FSAL
            double fac = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            h_ *= std::clamp(fac, 0.2, 5.0);
            n_steps_++;
            return true;
        }
        h_ *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
    }
}

Dopri5::State Dopri5::interpolate(double theta) const
{
    State r;
    for (int i = 0; i < 2; i++) {
        r[i] = rcont_[0][i] +
               theta * (rcont_[1][i] +
                        (1 - theta) * (rcont_[2][i] +
                                       theta * (rcont_[3][i] + (1 - theta) * rcont_[4][i])));
    }
    return r;
}

void Dopri5::integrate_to(double t_target)
{
    while (t_ < t_target) {
        double h_save = h_;
        if (t_ + h_ > t_target)
            h_ = t_target - t_;
        if (!step())
            throw IntegrationError("step size underflow in integrate_to");
        if (h_save > t_target - t_prev_)
            h_ = h_save;  // restore the controller's step after a clipped final step
    }
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol, int max_iter)
{
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0)
        throw Error("brent_root: no sign change on bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; it++) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2 * 2.22e-16 * std::fabs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0)
            return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2 * xm * s;
                q = 1 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2 * xm * qq * (qq - r) - (b - a) * (r - 1));
                q = (qq - 1) * (r - 1) * (s - 1);
            }
            if (p > 0) q = -q;
            p = std::fabs(p);
            if (2 * p < std::min(3 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
    }
    return b;
}

namespace {

// nodes/weights of the n-point Gauss-Legendre rule on [-1,1], computed once per order
struct GLRule {
    std::vector<double> x, w;
};

GLRule make_gl(int n)
{
    GLRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; i++) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), dp = 0;
        for (int it = 0; it < 100; it++) {
            double p0 = 1, p1 = 0;
            for (int j = 0; j < n; j++) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
            }
            dp = n * (z * p0 - p1) / (z * z - 1);
            double dz = p0 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-15)
                break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1 - z * z) * dp * dp);
    }
    return r;
}

const GLRule& gl_rule(int n)
{
    static GLRule r16 = make_gl(16), r32 = make_gl(32), r64 = make_gl(64);
    if (n <= 16) return r16;
    if (n <= 32) return r32;
    return r64;
}

double gl_apply(const std::function<double(double)>& f, double a, double b, const GLRule& r)
{
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0;
    for (std::size_t i = 0; i < r.x.size(); i++)
        s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double tol,
                    int depth, double whole)
{
    double mid = 0.5 * (a + b);
    double left = gl_apply(f, a, mid, gl_rule(32));
    double right = gl_apply(f, mid, b, gl_rule(32));
    if (depth <= 0 || std::fabs(left + right - whole) < tol)
        return left + right;
    return adaptive_rec(f, a, mid, tol / 2, depth - 1, left) +
           adaptive_rec(f, mid, b, tol / 2, depth - 1, right);
}

} // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int order)
{
    return gl_apply(f, a, b, gl_rule(order));
}

double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                      double tol, int max_depth)
{
    double whole = gl_apply(f, a, b, gl_rule(32));
    return adaptive_rec(f, a, b, std::max(tol, 1e-15 * std::fabs(whole)), max_depth, whole);
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
{
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw Error("Pchip: need at least two points and matching sizes");
    for (std::size_t i = 1; i < n; i++)
        if (!(x_[i] > x_[i - 1]))
            throw Error("Pchip: abscissae must be strictly increasing");
    d_.resize(n);
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; i++) {
        h[i] = x_[i + 1] - x_[i];
        del[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
        d_[0] = d_[1] = del[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; i++) {
        if (del[i - 1] * del[i] <= 0) {
            d_[i] = 0;
        } else {
            double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    auto edge = [](double h0, double h1, double del0, double del1) {
        double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0)
            d = 0;
        else if (del0 * del1 < 0 && std::fabs(d) > 3 * std::fabs(del0))
            d = 3 * del0;
        return d;
    };
    d_[0] = edge(h[0], h[1], del[0], del[1]);
    d_[n - 1] = edge(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

std::size_t Pchip::locate(double xq) const
{
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    std::size_t i = (it == x_.begin()) ? 0 : (it - x_.begin() - 1);
    return std::min(i, x_.size() - 2);
}

double Pchip::operator()(double xq) const
{
    std::size_t i = locate(xq);
    double h = x_[i + 1] - x_[i], t = (xq - x_[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
}

double Pchip::derivative(double xq) const
{
    std::size_t i = locate(xq);
    double h = x_[i + 1] - x_[i], t = (xq - x_[i]) / h;
    double g00 = 6 * t * t - 6 * t, g10 = 3 * t * t - 4 * t + 1;
    double g01 = -6 * t * t + 6 * t, g11 = 3 * t * t - 2 * t;
    return (g00 * y_[i] + h * g10 * d_[i] + g01 * y_[i + 1] + h * g11 * d_[i + 1]) / h;
}

double Pchip::inverse(double yq) const
{
    bool incr = y_.back() > y_.front();
    for (std::size_t i = 1; i < y_.size(); i++)
        if ((y_[i] > y_[i - 1]) != incr)
            throw Error("Pchip::inverse: data not monotone");
    double lo = x_.front(), hi = x_.back();
    auto g = [&](double x) { return (*this)(x)-yq; };
    return brent_root(g, lo, hi);
}

double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2)
{
    double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
    double second = (d12 - d01) / (x2 - x0);
    if (second == 0)
        return x1;
    return 0.5 * (x0 + x1 - d01 / second);
}

void fft_pow2(std::vector<cplx>& a, bool inverse)
{
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)))
        throw Error("fft_pow2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; i++) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2 * M_PI / (double)len * (inverse ? 1 : -1);
        cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1, 0);
            for (std::size_t j = 0; j < len / 2; j++) {
                cplx u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& y)
{
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); i++)
        out[i] = out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y)
{
    double s = 0;
    for (std::size_t i = 1; i < x.size(); i++)
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

}} // namespace kerrosc::math
