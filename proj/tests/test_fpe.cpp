#include "kerrosc/fpe.hpp"
#include "kerrosc/tunneling.hpp"
#include "kerrosc/errors.hpp"
#include <doctest.h>

using namespace kerrosc;

namespace {

struct Setup {
    ModelParams p;
    PhasePortrait pp;
    RegionTable t2, t3;
    TunnelProfile prof;
};

Setup make_setup(double m, double fr, double a3, double gamma, double nth,
                 double prefactor = 1.0, int points = 72)
{
    Setup s;
    s.p.alpha = 1;
    s.p.delta = 0.5 * m;
    if (a3 != 0)
        s.p.alpha_q[3] = a3;
    s.p.gamma = gamma;
    s.p.n_thermal = nth;
    s.p.drive = fr * s.p.f_crit();
    s.pp = find_stationary_points(s.p);
    TableOptions topt;
    topt.workers = 2;
    s.t2 = tabulate_region(s.p, s.pp, Region::r2, topt);
    s.t3 = tabulate_region(s.p, s.pp, Region::r3, topt);
    TunnelProfileOptions popt;
    popt.prefactor = prefactor;
    popt.points = points;
    popt.workers = 2;
    s.prof = lambda_profile(s.p, s.pp, nearest_resonance(s.p).offset, popt);
    return s;
}

double branch_sup_dev(const std::vector<double>& a, const std::vector<double>& b,
                      double scale)
{
    double d = 0;
    for (std::size_t i = 0; i < a.size(); i++)
        d = std::max(d, std::fabs(a[i] - b[i]));
    return d / scale;
}

} // namespace

TEST_CASE("no tunneling: zero flow and classical growth away from the separatrix")
{
    Setup s = make_setup(12, 0.4, 1e-5, 5e-4, 3, 0.0);
    StationaryDistribution dist = stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3);
    CHECK(dist.flow_j == 0.0);
    // region-1 density grows with quasienergy (toward the low-amplitude state)
    for (std::size_t i = 1; i < dist.p1.size(); i++)
        CHECK(dist.p1[i] >= dist.p1[i - 1] * (1 - 1e-12));
    // regions stay independent: P1 != P3 in the window interior
    CHECK(std::fabs(dist.p1.back() - dist.p3.back()) > 0.01 * dist.p1.back());
    // region-2 density grows toward the high-amplitude state
    for (std::size_t i = 1; i < dist.p2.size(); i++)
        CHECK(dist.p2[i] <= dist.p2[i - 1] * (1 + 1e-12));
    Occupations occ = occupations_from_distribution(dist);
    CHECK(occ.p1 + occ.p2 + occ.p3 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("strong tunneling equilibrates and inverts the window slope")
{
    Setup s = make_setup(12, 0.4, 1e-5, 5e-4, 3);
    StationaryDistribution dist = stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3);
    for (std::size_t i = 0; i < dist.eps13.size(); i++) {
        if (dist.eps13[i] > dist.eps_crit)
            break;
        CHECK(dist.p1[i] == dist.p3[i]);
        if (i > 0)
            CHECK(dist.p1[i] < dist.p1[i - 1]);  // decays away from the separatrix
    }
}

TEST_CASE("synthetic symmetric coefficients yield exactly zero flow")
{
    // hand-built profile and tables with K1/D1 == K3/D3 and a resonant pair
    PhasePortrait pp;
    pp.bistable = true;
    pp.eps2 = -2;
    pp.eps_sep = 0;
    pp.eps1 = 1;
    ModelParams p;
    p.alpha = 1;
    p.delta = 1;
    p.gamma = 1e-2;
    p.n_thermal = 1;

    TunnelProfile prof;
    prof.prefactor = 1;
    const int n = 41;
    for (int i = 0; i < n; i++) {
        double e = 1e-3 + (1.0 - 2e-3) * i / (n - 1.0);
        prof.eps.push_back(e);
        prof.t.push_back(0.3 * std::exp(-6 * e));
        prof.mismatch.push_back(0.05 * (e - 0.5));   // root at e = 0.5
        prof.gamma13.push_back(1e-3);
        prof.gamma13_diag.push_back(5e-4);
        prof.t1.push_back(2.0);
        prof.k1.push_back(-0.5);
        prof.d1.push_back(4.0);
        prof.i1.push_back(1.0);
        prof.v1.push_back(0.0);
        prof.t3.push_back(2.0);
        prof.k3.push_back(-0.5);  // identical ratio to region 1
        prof.d3.push_back(4.0);
        prof.i3.push_back(5.0);
        prof.v3.push_back(0.0);
        prof.lambda.push_back(0.0);
    }
    prof.eps_crit = 0.2;
    prof.eps_res = 0.5;
    prof.res_t = 0.3 * std::exp(-3.0);
    prof.res_gamma = 5e-4;
    prof.res_mismatch = 0.0;
    prof.res_weight = prof.res_gamma * prof.res_t * prof.res_t /
                      (0.25 * prof.res_gamma * prof.res_gamma);
    for (std::size_t i = 0; i < prof.eps.size(); i++)
        if (prof.eps[i] <= prof.eps_crit) {
            double den = prof.mismatch[i] * prof.mismatch[i] +
                         0.25 * prof.gamma13[i] * prof.gamma13[i];
            prof.lambda[i] = prof.gamma13[i] * prof.t[i] * prof.t[i] / den;
        }

    RegionTable t2, t3;
    t2.region = Region::r2;
    t3.region = Region::r3;
    for (int i = 0; i < 31; i++) {
        double e2 = -2 + (2 - 1e-3) * i / 30.0;
        t2.eps.push_back(e2);
        t2.period.push_back(1.5);
        t2.drift.push_back(0.8);
        t2.diffusion.push_back(2.0);
        double e3 = 1.0 + 3.0 * i / 30.0;
        t3.eps.push_back(e3);
        t3.period.push_back(2.0);
        t3.drift.push_back(0.5);
        t3.diffusion.push_back(4.0);
    }
    StationaryDistribution dist = stationary_solution(p, pp, prof, t2, t3);
    CHECK(dist.flow_j == doctest::Approx(0.0).epsilon(1e-14));
    // with identical drift/diffusion ratios the two regions carry the same P
    for (std::size_t i = 0; i < dist.p1.size(); i++)
        CHECK(dist.p1[i] == doctest::Approx(dist.p3[i]).epsilon(1e-10));

    // localized-density sanity for the standalone occupation op
    StationaryDistribution toy = dist;
    for (auto& v : toy.p1) v = 0;
    for (auto& v : toy.p3) v = 0;
    for (auto& v : toy.p3t) v = 0;
    Occupations occ = occupations_from_distribution(toy);
    double total = occ.p1 + occ.p2 + occ.p3;
    CHECK(occ.p2 == doctest::Approx(total));  // all mass in region 2
}

TEST_CASE("closed form matches the finite-volume solve within one percent")
{
    // J = 0 configuration
    Setup a = make_setup(12, 0.4, 1e-5, 5e-4, 3);
    StationaryDistribution cf = stationary_solution(a.p, a.pp, a.prof, a.t2, a.t3);
    StationaryDistribution bv = bvp_cross_check(a.p, a.pp, a.prof, a.t2, a.t3);
    double scale = *std::max_element(cf.p1.begin(), cf.p1.end());
    CHECK(cf.flow_j == 0.0);
    CHECK(bv.flow_j == 0.0);
    CHECK(branch_sup_dev(cf.p1, bv.p1, scale) < 0.01);
    CHECK(branch_sup_dev(cf.p3, bv.p3, scale) < 0.01);
    double s2 = *std::max_element(cf.p2.begin(), cf.p2.end());
    CHECK(branch_sup_dev(cf.p2, bv.p2, s2) < 0.01);

    // flow-carrying configuration with a resonant pair
    Setup b = make_setup(20.0072, 0.2, 1e-5, 5e-3, 0.5, 1.0, 96);
    REQUIRE(b.prof.eps_res);
    StationaryDistribution cfb = stationary_solution(b.p, b.pp, b.prof, b.t2, b.t3);
    StationaryDistribution bvb = bvp_cross_check(b.p, b.pp, b.prof, b.t2, b.t3);
    CHECK(cfb.flow_j > 0);
    CHECK(bvb.flow_j == doctest::Approx(cfb.flow_j).epsilon(0.05));
    double sb = *std::max_element(cfb.p1.begin(), cfb.p1.end());
    CHECK(branch_sup_dev(cfb.p1, bvb.p1, sb) < 0.01);
    CHECK(branch_sup_dev(cfb.p3, bvb.p3, sb) < 0.01);
}

TEST_CASE("grid refinement halves the mismatch or better")
{
    // run at stronger noise gradients where discretization dominates
    double dev[2];
    int k = 0;
    for (int pts : {48, 96}) {
        Setup s = make_setup(20.0072, 0.2, 1e-5, 5e-3, 0.5, 1.0, pts);
        StationaryDistribution cf = stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3);
        StationaryDistribution bv = bvp_cross_check(s.p, s.pp, s.prof, s.t2, s.t3);
        double scale = *std::max_element(cf.p1.begin(), cf.p1.end());
        dev[k++] = std::max(branch_sup_dev(cf.p1, bv.p1, scale),
                            branch_sup_dev(cf.p3, bv.p3, scale));
    }
    CHECK(dev[1] < 0.5 * dev[0]);
}

TEST_CASE("junction continuity and flow sign at the resonant pair")
{
    Setup s = make_setup(20.0072, 0.2, 1e-5, 5e-3, 0.5, 1.0, 96);
    REQUIRE(s.prof.eps_res);
    StationaryDistribution dist = stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3);
    // continuity across eps_crit and eps_res: the discrete step at each
    // junction node is no spike relative to its neighbours
    for (double e_j : {dist.eps_crit, *dist.eps_res}) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < dist.eps13.size(); i++)
            if (std::fabs(dist.eps13[i] - e_j) < std::fabs(dist.eps13[j] - e_j))
                j = i;
        REQUIRE(j >= 2);
        REQUIRE(j + 2 < dist.eps13.size());
        for (const std::vector<double>* pv : {&dist.p1, &dist.p3}) {
            const std::vector<double>& pv_ref = *pv;
            double step_l = std::fabs(pv_ref[j] - pv_ref[j - 1]);
            double step_r = std::fabs(pv_ref[j + 1] - pv_ref[j]);
            double nb = std::max({std::fabs(pv_ref[j - 1] - pv_ref[j - 2]),
                                  std::fabs(pv_ref[j + 2] - pv_ref[j + 1]), 1e-12});
            CHECK(step_l < 5 * nb + 1e-9);
            CHECK(step_r < 5 * nb + 1e-9);
        }
    }
    // J transports probability 1 -> 3 when P1 > P3 at the resonance
    math::Pchip p1i(dist.eps13, dist.p1), p3i(dist.eps13, dist.p3);
    double e = *dist.eps_res;
    CHECK(p1i(e) > p3i(e));
    CHECK(dist.flow_j > 0);
}

TEST_CASE("flow shrinks as the resonant pair climbs the barrier")
{
    // deeper into the resonance band eps_res moves up where the amplitude is
    // exponentially smaller, so J decays monotonically
    std::vector<double> js;
    for (double off : {0.0036, 0.00375, 0.0039, 0.00405}) {
        Setup s = make_setup(20 + 2 * off, 0.2, 1e-5, 5e-3, 0.5);
        if (!s.prof.eps_res)
            continue;
        StationaryDistribution dist = stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3);
        js.push_back(dist.flow_j);
    }
    REQUIRE(js.size() >= 3);
    CHECK(js.front() > 0);
    for (std::size_t i = 1; i < js.size(); i++)
        CHECK(js[i] < js[i - 1]);
}

TEST_CASE("detailed-balance limit reproduces the analytic exponential exactly")
{
    Setup s = make_setup(12, 0.4, 0, 1e-3, 3, 0.0);
    StationaryDistribution dist = stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3);
    // region 2 alone: P proportional to exp(-(gamma/Q) int K/D) against a
    // fine independent quadrature of the tabulated ratio
    const double goq = 1.0 / (s.p.n_thermal + 0.5);
    math::Pchip kd(s.t2.eps, [&] {
        std::vector<double> r(s.t2.eps.size());
        for (std::size_t i = 0; i < r.size(); i++)
            r[i] = s.t2.drift[i] / s.t2.diffusion[i];
        return r;
    }());
    double e_top = dist.eps2.back();
    for (std::size_t i = 0; i + 1 < dist.eps2.size(); i += 5) {
        double integral = math::adaptive_gauss([&](double e) { return kd(e); },
                                               dist.eps2[i], e_top, 1e-12);
        double expect = dist.p2.back() * std::exp(goq * integral);
        CHECK(dist.p2[i] == doctest::Approx(expect).epsilon(2e-3));
    }
}

TEST_CASE("negative-probability guard trips beyond the clip tolerance")
{
    Setup s = make_setup(12, 0.4, 1e-5, 5e-4, 3);
    FpeOptions opt;
    opt.clip_tolerance = 0;  // any negative mass is fatal
    // a healthy solve has no negatives, so this should still pass
    CHECK_NOTHROW(stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3, opt));
}

TEST_CASE("smooth-lambda cross-check documents the crossover layer")
{
    Setup s = make_setup(12, 0.4, 1e-5, 5e-4, 3);
    StationaryDistribution cf = stationary_solution(s.p, s.pp, s.prof, s.t2, s.t3);
    FpeOptions opt;
    opt.smooth_lambda = true;
    StationaryDistribution sm = bvp_cross_check(s.p, s.pp, s.prof, s.t2, s.t3, opt);
    double scale = *std::max_element(cf.p1.begin(), cf.p1.end());
    double dev = branch_sup_dev(cf.p1, sm.p1, scale);
    // the layer effect is real: a few percent to a few tens of percent, and
    // far larger than the discretization error of the piecewise solve
    CHECK(dev > 0.02);
    CHECK(dev < 0.5);
}
