#include "kerrosc/parallel.hpp"
#include "kerrosc/liouvillian.hpp"
#include "kerrosc/spectrum.hpp"
#include "kerrosc/classical.hpp"
#include <doctest.h>
#include <cstdlib>

using namespace kerrosc;

TEST_CASE("parallel_for matches the serial reference bitwise")
{
    auto kernel = [](std::size_t i) {
        double x = 0.1 * (double)(i + 1);
        for (int k = 0; k < 50; k++)
            x = std::sin(x) + std::sqrt(x + 1);
        return x;
    };
    std::vector<double> serial(64), parallel(64);
    parallel_for(64, 1, [&](std::size_t i) { serial[i] = kernel(i); });
    parallel_for(64, 2, [&](std::size_t i) { parallel[i] = kernel(i); });
    for (int i = 0; i < 64; i++)
        CHECK(serial[i] == parallel[i]);
}

TEST_CASE("exceptions from workers propagate")
{
    CHECK_THROWS_AS(parallel_for(8, 2,
                                 [](std::size_t i) {
                                     if (i == 5)
                                         throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("worker resolution: explicit count, environment, hardware")
{
    CHECK(resolve_workers(3) == 3);
    setenv("KERROSC_WORKERS", "2", 1);
    CHECK(resolve_workers(0) == 2);
    unsetenv("KERROSC_WORKERS");
    CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("steady-state sweep is identical between serial and pool paths")
{
    ModelParams p;
    p.alpha = 1;
    p.gamma = 2e-3;
    p.n_thermal = 1;
    p.drive = 0.5;
    std::vector<double> grid = {4.0, 4.02, 4.04, 4.06};
    auto serial = sweep_occupations(p, grid, 16, 1);
    auto pooled = sweep_occupations(p, grid, 16, 2);
    REQUIRE(serial.size() == pooled.size());
    for (std::size_t i = 0; i < serial.size(); i++) {
        CHECK(serial[i].ok == pooled[i].ok);
        CHECK(serial[i].p2 == pooled[i].p2);           // bitwise
        CHECK(serial[i].mean_intensity == pooled[i].mean_intensity);
    }
}

TEST_CASE("orbit tabulation is identical between serial and pool paths")
{
    ModelParams p;
    p.alpha = 1;
    p.delta = 5;
    p.drive = 0.3 * p.f_crit();
    PhasePortrait pp = find_stationary_points(p);
    TableOptions a, b;
    a.points = 16;
    b.points = 16;
    a.workers = 1;
    b.workers = 2;
    RegionTable ta = tabulate_region(p, pp, Region::r2, a);
    RegionTable tb = tabulate_region(p, pp, Region::r2, b);
    REQUIRE(ta.eps.size() == tb.eps.size());
    for (std::size_t i = 0; i < ta.eps.size(); i++) {
        CHECK(ta.period[i] == tb.period[i]);           // bitwise
        CHECK(ta.drift[i] == tb.drift[i]);
        CHECK(ta.intensity[i] == tb.intensity[i]);
    }
}
