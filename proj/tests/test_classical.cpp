#include "kerrosc/classical.hpp"
#include "kerrosc/errors.hpp"
#include "kerrosc/math/numerics.hpp"
#include "oracles.hpp"
#include <doctest.h>

using namespace kerrosc;

namespace {

ModelParams bistable_params(double m = 12, double f_ratio = 0.4)
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 0.5 * m;
    p.drive = f_ratio * p.f_crit();
    return p;
}

} // namespace

TEST_CASE("critical drive and root counts against the cubic discriminant")
{
    ModelParams p;
    p.delta = 3;
    p.alpha = 1;
    CHECK(p.f_crit() == doctest::Approx(2.0));

    for (double f : {1.2, 2.5}) {
        p.drive = f;
        PhasePortrait pp = find_stationary_points(p);
        CHECK((int)pp.points.size() == oracles::cubic_real_root_count(1, 3, f));
        CHECK(pp.bistable == (f < 2.0));
    }
}

TEST_CASE("zero drive is rejected as degenerate")
{
    ModelParams p;
    p.delta = 3;
    p.alpha = 1;
    CHECK_THROWS_AS(find_stationary_points(p), Error);
}

TEST_CASE("stationary structure and quasienergy ordering")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    REQUIRE(pp.bistable);
    CHECK(pp.eps2 < pp.eps_sep);
    CHECK(pp.eps_sep < pp.eps1);
    CHECK(pp.a2 < 0);                            // high-amplitude center
    CHECK(pp.a1 > 0);
    CHECK(pp.a_saddle > pp.a1);
    CHECK(pp.a2 * pp.a2 > 0.5 * p.delta / p.alpha);  // near the Kerr ring intensity
    CHECK(pp.omega1 > 0);
    CHECK(pp.omega2 > 0);
    CHECK(pp.omega1 ==
          doctest::Approx(oracles::hessian_frequency(p, pp.a1)).epsilon(1e-10));
}

TEST_CASE("near-center orbit period approaches the Hessian frequency")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    double eps = pp.eps2 + 1e-3 * (pp.eps_sep - pp.eps2);
    ClassicalOrbit orb = trace_orbit(p, pp, Region::r2, eps);
    CHECK(orb.period == doctest::Approx(2 * M_PI / pp.omega2).epsilon(0.01));
}

TEST_CASE("orbit closes, conserves quasienergy, and respects reflection symmetry")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    for (Region r : {Region::r1, Region::r2, Region::r3}) {
        auto [lo, hi] = pp.window(r);
        double eps = 0.5 * (lo + (r == Region::r3 ? pp.eps1 : hi));
        ClassicalOrbit orb = trace_orbit(p, pp, r, eps);
        const int m = (int)orb.samples.size();
        CHECK(std::abs(orb.samples[0] - cplx(orb.seed, 0)) == 0.0);
        double h_scale = std::max(std::fabs(eps), 1.0);
        for (const cplx& a : orb.samples)
            CHECK(std::fabs(classical_hamiltonian(p, a) - eps) < 1e-8 * h_scale);
        // independently integrate the full period and compare against the
        // time-reflected first half
        using math::Dopri5;
        auto rhs = [&](const Dopri5::State& s) -> Dopri5::State {
            cplx g = classical_gradient(p, cplx(s[0], s[1]));
            return {g.imag(), -g.real()};
        };
        Dopri5 ode(rhs, 1e-12, 1e-300);
        ode.start(0, {orb.seed, 0.0});
        double max_err = 0;
        for (int j = 1; j < m; j++) {
            ode.integrate_to(orb.times[j]);
            cplx direct(ode.y()[0], ode.y()[1]);
            max_err = std::max(max_err, std::abs(direct - orb.samples[j]));
        }
        double max_abs = 0;
        for (const cplx& a : orb.samples)
            max_abs = std::max(max_abs, std::abs(a));
        CHECK(max_err < 1e-7 * max_abs);
        // closure of the independently integrated loop
        ode.integrate_to(orb.period);
        CHECK(std::hypot(ode.y()[0] - orb.seed, ode.y()[1]) < 1e-7 * max_abs);
    }
}

TEST_CASE("phase-space area two ways and Parseval identity")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    ClassicalOrbit orb = trace_orbit(p, pp, Region::r2, 0.4 * pp.eps2 + 0.6 * pp.eps_sep);

    // contour quadrature (i/2) oint (a da* - a* da) over the sampled loop
    const int m = (int)orb.samples.size();
    cplx acc(0, 0);
    for (int j = 0; j < m; j++) {
        const cplx &a = orb.samples[j], &b = orb.samples[(j + 1) % m];
        cplx mid = 0.5 * (a + b), d = b - a;
        acc += mid * std::conj(d) - std::conj(mid) * d;
    }
    double area_contour = std::abs(0.5 * (cplx(0, 1) * acc).real());
    CHECK(area_contour == doctest::Approx(orb.action_area).epsilon(1e-8));

    double parseval = 0;
    for (int k = orb.k_min; k <= orb.k_max(); k++)
        parseval += orb.harmonic(k) * orb.harmonic(k);
    CHECK(parseval == doctest::Approx(orb.mean_intensity).epsilon(1e-6));
    CHECK(orb.fourier_residual < 1e-6 * std::fabs(orb.harmonic(0) + 1e-30));
}

TEST_CASE("contour coefficients: drift sign, diffusion positivity, dA/deps = T")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    for (Region r : {Region::r1, Region::r2, Region::r3}) {
        auto [lo, hi] = pp.window(r);
        double eps = 0.5 * (lo + (r == Region::r3 ? pp.eps1 : hi));
        double de = 1e-5 * (pp.eps1 - pp.eps2);
        ClassicalOrbit o0 = trace_orbit(p, pp, r, eps - de);
        ClassicalOrbit o1 = trace_orbit(p, pp, r, eps);
        ClassicalOrbit o2 = trace_orbit(p, pp, r, eps + de);
        Coefficients c = orbit_coefficients(p, o1);
        CHECK(c.diffusion > 0);
        // period equals |dA/deps| by the action-angle relation
        double dade = (o2.action_area - o0.action_area) / (2 * de);
        CHECK(std::fabs(std::fabs(dade) - c.period) < 1e-4 * c.period);
        // drift sign convention: the dissipative flow obeys d eps/dt = -gamma K/T
        double gamma = 1e-5;
        double drift = oracles::dissipative_drift_rate(p, o1.samples[0], o1.period, gamma);
        double expect = -gamma * c.drift / c.period;
        CHECK(drift == doctest::Approx(expect).epsilon(0.02));
    }
}

TEST_CASE("coefficients vanish as the orbit shrinks onto the stable point")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    double w = pp.eps_sep - pp.eps2;
    ClassicalOrbit big = trace_orbit(p, pp, Region::r2, pp.eps2 + 0.3 * w);
    ClassicalOrbit small = trace_orbit(p, pp, Region::r2, pp.eps2 + 1e-5 * w);
    Coefficients cb = orbit_coefficients(p, big);
    Coefficients cs = orbit_coefficients(p, small);
    CHECK(std::fabs(cs.drift) < 1e-3 * std::fabs(cb.drift));
    CHECK(cs.diffusion < 1e-3 * cb.diffusion);
    CHECK(small.action_area < 1e-3 * big.action_area);
}

TEST_CASE("area monotonicity per region")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    TableOptions opt;
    opt.points = 24;
    for (Region r : {Region::r1, Region::r2, Region::r3}) {
        RegionTable tab = tabulate_region(p, pp, r, opt);
        for (std::size_t i = 1; i < tab.eps.size(); i++) {
            double da = tab.area_itp.y()[i] - tab.area_itp.y()[i - 1];
            if (r == Region::r1)
                CHECK(da < 0);  // orbits shrink toward the low-amplitude center
            else
                CHECK(da > 0);
        }
    }
}

TEST_CASE("period grows without bound toward the separatrix")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    double w = pp.eps1 - pp.eps_sep;
    double prev = 0;
    for (double off : {1e-1, 1e-2, 1e-3, 1e-4}) {
        ClassicalOrbit orb = trace_orbit(p, pp, Region::r1, pp.eps_sep + off * w);
        CHECK(orb.period > prev);
        prev = orb.period;
    }
    ClassicalOrbit far = trace_orbit(p, pp, Region::r1, pp.eps_sep + 1e-1 * w);
    CHECK(prev > 2 * far.period);
}

TEST_CASE("separatrix guard band rejects orbits where the period diverges")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    CHECK_THROWS_AS(trace_orbit(p, pp, Region::r1, pp.eps_sep + 1e-8 * std::fabs(pp.eps_sep)),
                    Error);
    CHECK_THROWS_AS(trace_orbit(p, pp, Region::r1, pp.eps1 + 1.0), Error);
}

TEST_CASE("quantized levels: spacing follows the period")
{
    ModelParams p = bistable_params();
    PhasePortrait pp = find_stationary_points(p);
    TableOptions opt;
    RegionTable tab = tabulate_region(p, pp, Region::r2, opt);
    auto levels = bohr_sommerfeld_levels(p, pp, Region::r2, &tab);
    REQUIRE(levels.size() >= 4);
    for (std::size_t i = 1; i + 1 < levels.size(); i++) {
        // stay away from the separatrix where the spacing varies fast
        if ((pp.eps_sep - levels[i + 1].eps) < 0.15 * (pp.eps_sep - pp.eps2))
            break;
        double spacing = levels[i + 1].eps - levels[i].eps;
        double expect = 2 * M_PI / tab.period_itp(0.5 * (levels[i + 1].eps + levels[i].eps));
        CHECK(spacing == doctest::Approx(expect).epsilon(0.05));
    }
}

TEST_CASE("weak-drive outer levels approach the bare Kerr ladder")
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 5;
    p.alpha_q[3] = 1e-4;
    p.drive = 0.02 * p.f_crit();
    PhasePortrait pp = find_stationary_points(p);
    auto levels = bohr_sommerfeld_levels(p, pp, Region::r3);
    REQUIRE(!levels.empty());
    auto bare = [&](double n) {
        return -p.delta * n + 0.5 * p.alpha * n * n + 1e-4 * n * n * n;
    };
    int hits = 0;
    for (const auto& lev : levels) {
        if (lev.eps < pp.eps1 + 1.0)
            continue;  // quantization offset ambiguity is largest near the window edge
        // find the closest bare level and require agreement below one spacing
        double best = 1e300;
        for (int n = 0; n <= 40; n++)
            best = std::min(best, std::fabs(bare(n) - lev.eps));
        double spacing = 2 * M_PI / trace_orbit(p, pp, Region::r3, lev.eps).period;
        CHECK(best < spacing);
        hits++;
    }
    CHECK(hits > 3);
}
