#include "kerrosc/spectrum.hpp"
#include "kerrosc/errors.hpp"
#include <doctest.h>

using namespace kerrosc;

namespace {

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; i++)
        v[i] = a + (b - a) * i / (n - 1.0);
    return v;
}

} // namespace

TEST_CASE("zero drive reproduces the bare ladder exactly")
{
    ModelParams p;
    p.delta = 2.3;
    p.alpha = 1;
    p.alpha_q[3] = 1e-3;
    QuasienergySpectrum sp = diagonalize(p, 12);
    CHECK(!sp.labels_valid);
    std::vector<double> bare;
    for (int n = 0; n <= 12; n++)
        bare.push_back(-2.3 * n + 0.5 * n * n + 1e-3 * n * n * n);
    std::sort(bare.begin(), bare.end());
    for (int i = 0; i <= 12; i++)
        CHECK(sp.levels[i].eps == doctest::Approx(bare[i]).epsilon(1e-13));
}

TEST_CASE("pure Kerr symmetry: levels n and m-n are exactly degenerate")
{
    const int m = 7;
    ModelParams p;
    p.alpha = 1;
    p.delta = 0.5 * m;  // eps_n - eps_{m-n} vanishes for the bare ladder
    QuasienergySpectrum sp = diagonalize(p, 14);
    CHECK(!sp.degenerate_clusters.empty());
    int hits = 0;
    for (int i = 0; i + 1 <= 14; i++)
        for (int j = i + 1; j <= 14; j++)
            if (std::fabs(sp.levels[i].eps - sp.levels[j].eps) < 1e-12)
                hits++;
    CHECK(hits >= 3);
}

TEST_CASE("synthetic avoided crossing recovers the analytic gap")
{
    const double t = 1e-3, e0 = 0.3, slope = 2.0, delta_star = 1.234;
    auto fn = [&](double d) {
        Eigen::MatrixXd h(3, 3);
        h.setZero();
        h(0, 0) = e0 + slope * (d - delta_star);
        h(1, 1) = e0 - slope * (d - delta_star);
        h(0, 1) = h(1, 0) = t;
        h(2, 2) = 5.0;
        return h;
    };
    ScanOptions opt;
    opt.max_gap = 0.1;
    opt.require_13 = false;
    ScanResult res = scan_gap_minima(fn, linspace(1.0, 1.5, 101), opt);
    REQUIRE(res.anticrossings.size() == 1);
    CHECK(res.anticrossings[0].delta_at_min == doctest::Approx(delta_star).epsilon(1e-6));
    CHECK(res.anticrossings[0].min_gap == doctest::Approx(2 * t).epsilon(1e-6));
    CHECK(!res.anticrossings[0].at_grid_edge);
}

TEST_CASE("pure-Kerr anticrossings sit at the integer resonance")
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 5;
    p.drive = 0.1 * p.f_crit();
    ScanOptions opt;
    opt.n_max = 40;
    opt.workers = 2;
    ScanResult res = scan_anticrossings(p, linspace(4.96, 5.04, 81), opt);
    REQUIRE(!res.anticrossings.empty());
    for (const auto& ac : res.anticrossings)
        CHECK(std::fabs(ac.delta_at_min - 5.0) < 1e-3);
}

TEST_CASE("sixth-order nonlinearity splits the anticrossing positions")
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 6;
    p.alpha_q[3] = 1e-4;
    p.drive = 0.1 * p.f_crit();
    ScanOptions opt;
    opt.n_max = 40;
    opt.workers = 2;
    ScanResult res = scan_anticrossings(p, linspace(5.9995, 6.025, 181), opt);
    REQUIRE(res.anticrossings.size() >= 2);
    std::vector<double> pos;
    for (const auto& ac : res.anticrossings) {
        if (ac.at_grid_edge)
            continue;
        pos.push_back(ac.delta_at_min);
        double measured = ac.delta_at_min - 6.0;
        CHECK(measured > 0);  // positive alpha3 pushes the resonances up
        if (!std::isnan(ac.predicted_shift))
            CHECK(std::fabs(ac.predicted_shift - measured) < 0.2 * std::fabs(measured));
    }
    std::sort(pos.begin(), pos.end());
    for (std::size_t i = 1; i < pos.size(); i++)
        CHECK(pos[i] - pos[i - 1] > 1e-4);  // distinct beyond refinement tolerance
}

TEST_CASE("first-order shift vanishes without the perturbation and scales linearly")
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 3;
    p.drive = 0.1 * p.f_crit();
    ScanOptions opt;
    opt.n_max = 30;
    opt.workers = 2;
    ScanResult res = scan_anticrossings(p, linspace(2.97, 3.03, 61), opt);
    REQUIRE(!res.anticrossings.empty());
    CHECK(std::fabs(res.anticrossings.front().predicted_shift) < 1e-12);

    ModelParams pa = p, pb = p;
    pa.alpha_q[3] = 1e-5;
    pb.alpha_q[3] = 2e-5;
    QuasienergySpectrum sp = diagonalize(p, 30);
    // pick the most strongly hybridized pair: close in quasienergy and equal
    // in mean photon (even mixtures), with well-separated +/- combinations
    Eigen::VectorXd nvec(31);
    for (int n = 0; n <= 30; n++)
        nvec(n) = n;
    int i = -1, j = -1;
    double best = 0;
    for (int a = 0; a < (int)sp.levels.size(); a++)
        for (int b = a + 1; b < (int)sp.levels.size(); b++) {
            double gap = std::fabs(sp.levels[a].eps - sp.levels[b].eps);
            double dn = std::fabs(sp.levels[a].mean_photon - sp.levels[b].mean_photon);
            if (gap > 0.3 || dn > 0.5)
                continue;
            Eigen::VectorXd up = (sp.basis.col(a) + sp.basis.col(b)) / std::sqrt(2.0);
            Eigen::VectorXd um = (sp.basis.col(a) - sp.basis.col(b)) / std::sqrt(2.0);
            double sep = std::fabs(up.cwiseAbs2().dot(nvec) - um.cwiseAbs2().dot(nvec));
            if (sep > 2 && gap > best) {
                best = gap;
                i = a;
                j = b;
            }
        }
    REQUIRE(i >= 0);
    double s1 = predict_shift(pa, 30, 3.0, i, j);
    double s2 = predict_shift(pb, 30, 3.0, i, j);
    CHECK(s2 == doctest::Approx(2 * s1).epsilon(1e-2));
}

TEST_CASE("detected gap is stable under truncation doubling")
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 3;
    p.drive = 0.1 * p.f_crit();
    auto grid = linspace(2.98, 3.02, 41);
    double gap[2];
    int k = 0;
    for (int n_max : {30, 60}) {
        ScanOptions opt;
        opt.n_max = n_max;
        opt.workers = 2;
        ScanResult res = scan_anticrossings(p, grid, opt);
        REQUIRE(!res.anticrossings.empty());
        double g = 1e300;
        for (const auto& ac : res.anticrossings)
            g = std::min(g, ac.min_gap);
        gap[k++] = g;
    }
    CHECK(std::fabs(gap[0] - gap[1]) < 1e-9 * gap[0] + 1e-14);
}

TEST_CASE("labels respect the classical quasienergy windows")
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 6;
    p.drive = 0.4 * p.f_crit();
    ClassicalBranches cb = build_classical_branches(p);
    QuasienergySpectrum sp = diagonalize(p, p.default_n_max(), &cb);
    REQUIRE(sp.labels_valid);
    const PhasePortrait& pp = cb.portrait;
    for (const auto& lev : sp.levels) {
        if (lev.boundary)
            continue;
        switch (lev.label) {
            case Region::r2:
                CHECK(lev.eps < pp.eps_sep);
                break;
            case Region::r1:
            case Region::r3:
                CHECK(lev.eps > pp.eps_sep - cb.band_of(pp));
                CHECK(lev.eps <= pp.eps1);
                break;
            case Region::r3_outer:
                CHECK(lev.eps > pp.eps1 - cb.band_of(pp));
                break;
        }
    }
}

TEST_CASE("anticrossing offsets grow with the resonance order")
{
    // at fixed pair rank the displacement away from the integer grows with m
    double prev = 0;
    for (int m : {8, 10, 12}) {
        ModelParams p;
        p.alpha = 1;
        p.delta = 0.5 * m;
        p.alpha_q[3] = 1e-4;
        p.drive = 0.1 * p.f_crit();
        ScanOptions opt;
        opt.n_max = 40;
        opt.workers = 2;
        ScanResult res =
            scan_anticrossings(p, linspace(0.5 * m - 0.002, 0.5 * m + 0.06, 125), opt);
        REQUIRE(!res.anticrossings.empty());
        // first (strongest, lowest-quasienergy) pair
        double off = 1e300;
        for (const auto& ac : res.anticrossings)
            if (!ac.at_grid_edge)
                off = std::min(off, ac.delta_at_min - 0.5 * m);
        CHECK(off > prev);
        prev = off;
    }
}

TEST_CASE("anticrossing count grows with the resonance order")
{
    ModelParams base;
    base.alpha = 1;
    int prev = 0;
    for (int m : {8, 12, 16}) {
        ModelParams p = base;
        p.delta = 0.5 * m;
        p.drive = 0.1 * p.f_crit();
        ScanOptions opt;
        opt.n_max = 50;
        opt.workers = 2;
        ScanResult res =
            scan_anticrossings(p, linspace(0.5 * m - 0.02, 0.5 * m + 0.02, 41), opt);
        int count = (int)res.anticrossings.size();
        CHECK(count >= prev);
        prev = count;
    }
    CHECK(prev >= 2);
}
