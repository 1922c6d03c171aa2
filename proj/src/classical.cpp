#include "kerrosc/classical.hpp"
#include "kerrosc/errors.hpp"
#include "kerrosc/parallel.hpp"
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace kerrosc {

using math::Dopri5;

const char* region_name(Region r)
{
    switch (r) {
        case Region::r1: return "1";
        case Region::r2: return "2";
        case Region::r3: return "3";
        case Region::r3_outer: return "3'";
    }
    return "?";
}

double classical_hamiltonian(const ModelParams& p, cplx a)
{
    double I = std::norm(a);
    return -p.delta * I + 0.5 * p.alpha * I * I + p.potential(I) + 2 * p.drive * a.real();
}

cplx classical_gradient(const ModelParams& p, cplx a)
{
    double I = std::norm(a);
    return (-p.delta + p.alpha * I + p.potential_deriv(I)) * a + p.drive;
}

std::pair<double, double> PhasePortrait::window(Region r) const
{
    switch (r) {
        case Region::r2: return {eps2, eps_sep};
        case Region::r1: return {eps_sep, eps1};
        case Region::r3: return {eps_sep, eps1};
        case Region::r3_outer: return {eps1, std::numeric_limits<double>::infinity()};
    }
    throw Error("window: bad region");
}

PhasePortrait find_stationary_points(const ModelParams& params)
{
    params.validate();
    if (!(params.drive > 0))
        throw Error("find_stationary_points: drive = 0 is degenerate "
                    "(continuum of stationary points at |a|^2 = delta/alpha)");
    if (!(params.alpha > 0))
        throw Error("find_stationary_points: requires alpha > 0");

    PhasePortrait pp;
    pp.params = params;

    // real-axis stationary condition x (alpha x^2 + V'(x^2) - delta) + drive = 0
    auto g = [&](double x) {
        double I = x * x;
        return x * (params.alpha * I + params.potential_deriv(I) - params.delta) + params.drive;
    };
    double span = std::sqrt(std::max(params.delta, 0.0) / params.alpha);
    double L = 2.5 * std::max({span, std::cbrt(2 * params.drive / params.alpha), 1e-3});
    const int nseg = 600;
    std::vector<double> roots;
    double x_prev = -L, g_prev = g(x_prev);
    for (int i = 1; i <= nseg; i++) {
        double x = -L + 2 * L * i / nseg, gx = g(x);
        if (g_prev == 0)
            roots.push_back(x_prev);
        else if (g_prev * gx < 0)
            roots.push_back(math::brent_root(g, x_prev, x));
        x_prev = x;
        g_prev = gx;
    }

    for (double x : roots) {
        StationaryPoint sp;
        sp.a = x;
        sp.eps = classical_hamiltonian(params, cplx(x, 0));
        double I = x * x;
        double G = -params.delta + params.alpha * I + params.potential_deriv(I);
        double Gp = params.alpha + params.potential_second(I);
        double hxx = 2 * G + 4 * I * Gp, hyy = 2 * G;
        if (hxx * hyy < 0) {
            sp.kind = StationaryPoint::Kind::saddle;
        } else if (hyy < 0) {
            sp.kind = StationaryPoint::Kind::center_low_amplitude;
            sp.omega = 0.5 * std::sqrt(hxx * hyy);
        } else {
            sp.kind = StationaryPoint::Kind::center_high_amplitude;
            sp.omega = 0.5 * std::sqrt(hxx * hyy);
        }
        pp.points.push_back(sp);
    }

    int n_saddle = 0, n_low = 0, n_high = 0;
    for (const auto& sp : pp.points) {
        switch (sp.kind) {
            case StationaryPoint::Kind::saddle: n_saddle++; pp.a_saddle = sp.a; pp.eps_sep = sp.eps; break;
            case StationaryPoint::Kind::center_low_amplitude:
                n_low++; pp.a1 = sp.a; pp.eps1 = sp.eps; pp.omega1 = sp.omega; break;
            case StationaryPoint::Kind::center_high_amplitude:
                n_high++; pp.a2 = sp.a; pp.eps2 = sp.eps; pp.omega2 = sp.omega; break;
        }
    }
    pp.bistable = (n_saddle == 1 && n_low == 1 && n_high == 1);
    if (!pp.bistable && pp.points.size() != 1) {
        std::ostringstream os;
        os << "find_stationary_points: unexpected stationary-point structure (" << pp.points.size()
           << " roots, " << n_saddle << " saddles)";
        throw Error(os.str());
    }
    return pp;
}

double orbit_seed(const ModelParams& params, const PhasePortrait& pp, Region region, double eps)
{
    if (!pp.bistable)
        throw Error("orbit_seed: bistable portrait required");
    auto h = [&](double x) { return classical_hamiltonian(params, cplx(x, 0)) - eps; };
    double lo, hi;
    switch (region) {
        case Region::r2:
            lo = pp.a2;
            hi = pp.a1;
            break;
        case Region::r1:
            lo = pp.a1;
            hi = pp.a_saddle;
            break;
        case Region::r3:
        case Region::r3_outer: {
            lo = pp.a_saddle;
            hi = std::max(2 * std::fabs(pp.a_saddle), 1.0);
            int guard = 0;
            while (h(hi) < 0 && guard++ < 200)
                hi *= 1.5;
            if (h(hi) < 0)
                throw Error("orbit_seed: failed to bracket the outer branch");
            break;
        }
        default:
            throw Error("orbit_seed: bad region");
    }
    // nudge off the stationary endpoints where h vanishes by construction
    double w = hi - lo;
    lo += 1e-13 * w;
    hi -= 1e-13 * w;
    if (h(lo) * h(hi) > 0)
        throw Error("orbit_seed: quasienergy outside the region window");
    return math::brent_root(h, lo, hi);
}

namespace {

struct HalfPeriod {
    double t_half;
    Dopri5::State end;
};

// integrate from a real-axis point to the next crossing of the real axis
HalfPeriod integrate_half(const ModelParams& params, double seed, double rtol, double t_max)
{
    auto rhs = [&params](const Dopri5::State& s) -> Dopri5::State {
        cplx grad = classical_gradient(params, cplx(s[0], s[1]));
        return {grad.imag(), -grad.real()};
    };
    Dopri5 ode(rhs, rtol, 1e-300);
    ode.start(0.0, {seed, 0.0});
    double y_prev = 0;
    bool armed = false;
    while (ode.t_end() < t_max) {
        if (!ode.step())
            throw IntegrationError("orbit integration: step underflow");
        double y = ode.y()[1];
        if (!armed) {
            if (y != 0)
                armed = true;
            y_prev = y;
            continue;
        }
        if (y_prev != 0 && y * y_prev <= 0) {
            // bisect on the dense output inside the step
            double lo = 0, hi = 1;
            for (int it = 0; it < 80; it++) {
                double mid = 0.5 * (lo + hi);
                double ym = ode.interpolate(mid)[1];
                if (ym == 0) { lo = hi = mid; break; }
                if ((ym > 0) == (y_prev > 0))
                    lo = mid;
                else
                    hi = mid;
            }
            double theta = 0.5 * (lo + hi);
            double t_cross = ode.t_begin() + theta * (ode.t_end() - ode.t_begin());
            return {t_cross, ode.interpolate(theta)};
        }
        y_prev = y;
    }
    throw IntegrationError("orbit failed to return to the real axis (period bound exceeded)");
}

} // namespace

namespace {
ClassicalOrbit trace_orbit_impl(const ModelParams& params, const PhasePortrait& pp,
                                Region region, double eps, const OrbitOptions& opt);
}

ClassicalOrbit trace_orbit(const ModelParams& params, const PhasePortrait& pp, Region region,
                           double eps, const OrbitOptions& opt)
{
    // near the separatrix the saddle passage amplifies integration error;
    // retry once with a tighter tolerance before giving up
    try {
        return trace_orbit_impl(params, pp, region, eps, opt);
    } catch (const IntegrationError&) {
        OrbitOptions tight = opt;
        tight.rtol = std::min(opt.rtol * 1e-2, 1e-13);
        return trace_orbit_impl(params, pp, region, eps, tight);
    }
}

namespace {
ClassicalOrbit trace_orbit_impl(const ModelParams& params, const PhasePortrait& pp,
                                Region region, double eps, const OrbitOptions& opt)
{
    if (!pp.bistable)
        throw Error("trace_orbit: bistable portrait required");
    const double span = pp.eps1 - pp.eps2;
    double sep_guard = std::max(opt.sep_margin * std::fabs(pp.eps_sep), 1e-13 * span);
    if (std::fabs(eps - pp.eps_sep) < sep_guard)
        throw Error("trace_orbit: quasienergy within the separatrix guard band "
                    "(period diverges)");
    auto [wlo, whi] = pp.window(region == Region::r3_outer ? Region::r3_outer : region);
    if (region == Region::r3 || region == Region::r3_outer) {
        wlo = pp.eps_sep;  // outer branch is a single family in eps
        whi = std::numeric_limits<double>::infinity();
    }
    if (!(eps > wlo && eps < whi))
        throw Error("trace_orbit: quasienergy outside the region window");

    const double seed = orbit_seed(params, pp, region, eps);

    double omega_est = std::max({pp.omega1, pp.omega2, params.alpha * std::max(seed * seed, 1.0)});
    double t_max = 1e4 * 2 * M_PI / omega_est;

    HalfPeriod half = integrate_half(params, seed, opt.rtol, t_max);
    const double period = 2 * half.t_half;

    ClassicalOrbit orbit;
    orbit.region = (region == Region::r3 && eps > pp.eps1) ? Region::r3_outer : region;
    orbit.eps = eps;
    orbit.period = period;
    orbit.seed = seed;

    auto rhs = [&params](const Dopri5::State& s) -> Dopri5::State {
        cplx grad = classical_gradient(params, cplx(s[0], s[1]));
        return {grad.imag(), -grad.real()};
    };

    int m = opt.samples;
    double max_abs = 0;
    for (;;) {
        // integrate the first half and mirror it: for real drive the orbit
        // satisfies a(T - t) = conj(a(t)) exactly, so the loop closes by
        // construction and the Fourier coefficients come out real
        orbit.times.assign(m, 0.0);
        orbit.samples.assign(m, cplx(0, 0));
        Dopri5 ode(rhs, opt.rtol, 1e-300);
        ode.start(0.0, {seed, 0.0});
        for (int j = 0; j <= m / 2; j++) {
            double tj = period * j / m;
            orbit.times[j] = tj;
            if (tj > 0)
                ode.integrate_to(tj);
            auto s = (tj > 0) ? ode.y() : Dopri5::State{seed, 0.0};
            orbit.samples[j] = cplx(s[0], s[1]);
        }
        for (int j = m / 2 + 1; j < m; j++) {
            orbit.times[j] = period * j / m;
            orbit.samples[j] = std::conj(orbit.samples[m - j]);
        }
        max_abs = 0;
        for (const auto& a : orbit.samples)
            max_abs = std::max(max_abs, std::abs(a));
        // landing defect at the far real-axis crossing is the honest measure
        // of the accumulated integration error (closure itself is exact)
        double defect = std::fabs(orbit.samples[m / 2].imag());
        if (defect > 1e-8 * std::max(max_abs, 1e-30))
            throw IntegrationError("orbit failed to close to tolerance");
        orbit.samples[m / 2] = cplx(orbit.samples[m / 2].real(), 0.0);

        // Fourier coefficients c_k = (1/M) sum_j a_j exp(+2 pi i k j / M)
        std::vector<cplx> buf = orbit.samples;
        math::fft_pow2(buf, false);
        auto coeff = [&](int k) { return buf[((k % m) + m) % m == 0 ? 0 : (m - ((k % m) + m) % m)] / (double)m; };
        double cmax = 0;
        for (int k = -m / 2 + 1; k < m / 2; k++)
            cmax = std::max(cmax, std::abs(coeff(k)));
        // aliasing check: the top octave of harmonics must be below the tail threshold
        double top = 0;
        for (int k = m / 4; k < m / 2; k++)
            top = std::max({top, std::abs(coeff(k)), std::abs(coeff(-k))});
        if (top > opt.fourier_tail * cmax && 2 * m <= opt.max_samples) {
            m *= 2;
            continue;
        }
        int klo = 0, khi = 0;
        for (int k = -m / 2 + 1; k < m / 2; k++) {
            if (std::abs(coeff(k)) >= opt.fourier_tail * cmax) {
                klo = std::min(klo, k);
                khi = std::max(khi, k);
            }
        }
        orbit.k_min = klo;
        orbit.fourier.resize(khi - klo + 1);
        orbit.fourier_residual = 0;
        for (int k = klo; k <= khi; k++) {
            cplx c = coeff(k);
            orbit.fourier[k - klo] = c.real();
            orbit.fourier_residual = std::max(orbit.fourier_residual, std::fabs(c.imag()));
        }
        break;
    }

    // quasienergy conservation along the samples
    double h_scale = std::max(std::fabs(eps), 1e-3 * span);
    double h_err = 0;
    for (const auto& a : orbit.samples)
        h_err = std::max(h_err, std::fabs(classical_hamiltonian(params, a) - eps));
    if (h_err > 1e-8 * h_scale)
        throw IntegrationError("orbit quasienergy drift exceeds tolerance");

    double sum_i = 0, sum_v = 0;
    for (const auto& a : orbit.samples) {
        double I = std::norm(a);
        sum_i += I;
        sum_v += params.potential(I);
    }
    orbit.mean_intensity = sum_i / m;
    orbit.mean_potential = sum_v / m;

    // phase-space area |oint (x dy - y dx)| from the sampled polygon
    double sa = 0;
    for (int j = 0; j < m; j++) {
        const cplx &a = orbit.samples[j], &b = orbit.samples[(j + 1) % m];
        sa += a.real() * b.imag() - b.real() * a.imag();
    }
    orbit.action_area = std::fabs(sa);
    return orbit;
}
} // namespace

Coefficients orbit_coefficients(const ModelParams& params, const ClassicalOrbit& orbit)
{
    const int m = (int)orbit.samples.size();
    if (m == 0)
        throw Error("orbit_coefficients: empty orbit");
    double k_sum = 0, d_sum = 0;
    for (const auto& a : orbit.samples) {
        cplx grad = classical_gradient(params, a);
        k_sum += (a * std::conj(grad)).real();
        d_sum += std::norm(grad);
    }
    Coefficients c;
    c.period = orbit.period;
    c.drift = orbit.period * k_sum / m;
    c.diffusion = orbit.period * d_sum / m;
    if (!(c.diffusion >= 0))
        throw QuadratureError("orbit_coefficients: negative diffusion coefficient");
    return c;
}

RegionTable tabulate_region(const ModelParams& params, const PhasePortrait& pp, Region region,
                            const TableOptions& opt)
{
    if (!pp.bistable)
        throw Error("tabulate_region: bistable portrait required");
    const double span = pp.eps1 - pp.eps2;
    // innermost grid offset must clear the separatrix guard band of trace_orbit
    const double sep_guard =
        std::max(opt.orbit.sep_margin * std::fabs(pp.eps_sep), 1e-13 * span);
    std::set<double> grid;

    auto log_offsets = [&](double from_rel, double to_rel, int n, std::vector<double>& out) {
        double l0 = std::log(from_rel), l1 = std::log(to_rel);
        for (int i = 0; i < n; i++)
            out.push_back(std::exp(l0 + (l1 - l0) * i / (n - 1.0)));
    };

    const int n = std::max(opt.points, 8);
    if (region == Region::r2 || region == Region::r1) {
        auto [lo, hi] = pp.window(region);
        double w = hi - lo;
        double sep_end = (region == Region::r2) ? hi : lo;   // separatrix side
        double far_end = (region == Region::r2) ? lo : hi;   // stable-point side
        double sep_refine = std::max(opt.sep_refine, 1.5 * sep_guard / w);
        std::vector<double> offs;
        log_offsets(sep_refine, 0.5, (2 * n) / 3, offs);
        for (double o : offs)
            grid.insert(sep_end + (far_end > sep_end ? 1 : -1) * o * w);
        offs.clear();
        log_offsets(std::max(opt.edge_margin, 1e-9), 0.5, n - (2 * n) / 3, offs);
        for (double o : offs)
            grid.insert(far_end + (sep_end > far_end ? 1 : -1) * o * w);
    } else {
        // region 3: refined toward the separatrix, covering (eps_sep, eps1] plus a tail
        double w = pp.eps1 - pp.eps_sep;
        double sep_refine = std::max(opt.sep_refine, 1.5 * sep_guard / w);
        std::vector<double> offs;
        log_offsets(sep_refine, 1.0 - 1e-9, n, offs);
        for (double o : offs)
            grid.insert(pp.eps_sep + o * w);
        // Tail above eps1. The outer-branch level spacing is Omega(eps) =
        // dH/dI ~ sqrt(delta^2 + 2 alpha eps) and the zero-flow decay exponent
        // advances by 1/(N+1/2) per level, so step in fractions of
        // (N+1/2)*Omega until the requested truncation exponent is reached.
        const double nq = params.n_thermal + 0.5;
        double e = pp.eps1, accum = 0;
        while (accum < opt.tail_exponent && e < pp.eps_sep + opt.tail_cap * span) {
            double omega = std::sqrt(std::max(params.delta * params.delta + 2 * params.alpha * e,
                                              1e-6 * params.alpha * params.alpha));
            double step = opt.tail_step * nq * omega;
            e += step;
            accum += opt.tail_step;
            grid.insert(e);
        }
    }

    RegionTable tab;
    tab.region = region;
    tab.eps.assign(grid.begin(), grid.end());
    tab.eps.erase(std::unique(tab.eps.begin(), tab.eps.end(),
                              [span](double a, double b) { return b - a < 1e-11 * span; }),
                  tab.eps.end());
    const std::size_t np = tab.eps.size();
    tab.period.resize(np);
    tab.drift.resize(np);
    tab.diffusion.resize(np);
    tab.intensity.resize(np);
    tab.potential_avg.resize(np);
    tab.orbits.resize(np);
    std::vector<double> area(np);

    parallel_for(np, opt.workers, [&](std::size_t i) {
        ClassicalOrbit orb = trace_orbit(params, pp, region, tab.eps[i], opt.orbit);
        Coefficients c = orbit_coefficients(params, orb);
        tab.period[i] = c.period;
        tab.drift[i] = c.drift;
        tab.diffusion[i] = c.diffusion;
        tab.intensity[i] = orb.mean_intensity;
        tab.potential_avg[i] = orb.mean_potential;
        area[i] = orb.action_area;
        tab.orbits[i] = std::move(orb);
    });

    tab.period_itp = math::Pchip(tab.eps, tab.period);
    tab.drift_itp = math::Pchip(tab.eps, tab.drift);
    tab.diffusion_itp = math::Pchip(tab.eps, tab.diffusion);
    tab.intensity_itp = math::Pchip(tab.eps, tab.intensity);
    tab.potential_itp = math::Pchip(tab.eps, tab.potential_avg);
    tab.area_itp = math::Pchip(tab.eps, area);
    return tab;
}

std::vector<BohrLevel> bohr_sommerfeld_levels(const ModelParams& params, const PhasePortrait& pp,
                                              Region region, const RegionTable* table,
                                              double eps_cap)
{
    RegionTable local;
    if (!table) {
        TableOptions opt;
        local = tabulate_region(params, pp, region, opt);
        table = &local;
    }
    const auto& area = table->area_itp;
    double a_lo = area.y().front(), a_hi = area.y().back();
    if (a_lo > a_hi)
        std::swap(a_lo, a_hi);
    std::vector<BohrLevel> levels;
    int n0 = std::max(0, (int)std::ceil(a_lo / (2 * M_PI) - 0.5));
    for (int nq = n0;; nq++) {
        double target = 2 * M_PI * (nq + 0.5);
        if (target > a_hi)
            break;
        if (target < a_lo)
            continue;
        BohrLevel lev;
        lev.n = nq;
        lev.eps = area.inverse(target);
        if (eps_cap != 0 && lev.eps > eps_cap)
            continue;
        levels.push_back(lev);
    }
    std::sort(levels.begin(), levels.end(),
              [](const BohrLevel& a, const BohrLevel& b) { return a.eps < b.eps; });
    return levels;
}

} // namespace kerrosc
