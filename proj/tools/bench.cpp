// Timing comparison between the serial reference path (workers = 1) and the
// OpenMP pool for the three data-parallel kernels: detuning eigenscans,
// orbit tabulation, and quantum steady-state sweeps.
#include "kerrosc/classical.hpp"
#include "kerrosc/liouvillian.hpp"
#include "kerrosc/parallel.hpp"
#include "kerrosc/spectrum.hpp"
#include <chrono>
#include <cstdio>
#include <omp.h>

using namespace kerrosc;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds(clock_type::time_point a, clock_type::time_point b)
{
    return std::chrono::duration<double>(b - a).count();
}

template <typename Fn>
double timed(Fn&& fn)
{
    auto t0 = clock_type::now();
    fn();
    return seconds(t0, clock_type::now());
}

} // namespace

int main(int argc, char** argv)
{
    int threads = omp_get_max_threads();
    if (argc > 1)
        threads = std::atoi(argv[1]);
    std::printf("comparing serial reference (workers=1) vs OpenMP (workers=%d)\n\n", threads);

    ModelParams p;
    p.alpha = 1;
    p.delta = 6;
    p.gamma = 1e-3;
    p.n_thermal = 3;
    p.drive = 0.4 * p.f_crit();

    // eigenscan kernel
    {
        std::vector<double> grid;
        for (int i = 0; i < 48; i++)
            grid.push_back(5.97 + 0.06 * i / 47.0);
        ScanOptions opt;
        opt.n_max = 40;
        opt.require_13 = false;
        double t_serial = timed([&] {
            opt.workers = 1;
            scan_gap_minima([&](double d) {
                ModelParams q = p;
                q.delta = d;
                return Eigen::MatrixXd(build_hamiltonian(q, opt.n_max).real());
            }, grid, opt);
        });
        double t_par = timed([&] {
            opt.workers = threads;
            scan_gap_minima([&](double d) {
                ModelParams q = p;
                q.delta = d;
                return Eigen::MatrixXd(build_hamiltonian(q, opt.n_max).real());
            }, grid, opt);
        });
        std::printf("eigenscan  48 pts : serial %7.3f s  parallel %7.3f s  speedup %.2fx\n",
                    t_serial, t_par, t_serial / t_par);
    }

    // orbit tabulation kernel
    {
        PhasePortrait pp = find_stationary_points(p);
        TableOptions opt;
        opt.points = 64;
        double t_serial = timed([&] {
            opt.workers = 1;
            tabulate_region(p, pp, Region::r3, opt);
        });
        double t_par = timed([&] {
            opt.workers = threads;
            tabulate_region(p, pp, Region::r3, opt);
        });
        std::printf("orbits     64 pts : serial %7.3f s  parallel %7.3f s  speedup %.2fx\n",
                    t_serial, t_par, t_serial / t_par);
    }

    // steady-state sweep kernel
    {
        std::vector<double> grid;
        for (int i = 0; i < 12; i++)
            grid.push_back(5.99 + 0.02 * i / 11.0);
        double t_serial = timed([&] { sweep_occupations(p, grid, 24, 1); });
        double t_par = timed([&] { sweep_occupations(p, grid, 24, threads); });
        std::printf("sweep      12 pts : serial %7.3f s  parallel %7.3f s  speedup %.2fx\n",
                    t_serial, t_par, t_serial / t_par);
    }
    return 0;
}
