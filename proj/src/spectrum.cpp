#include "kerrosc/spectrum.hpp"
#include "kerrosc/errors.hpp"
#include "kerrosc/parallel.hpp"
#include <algorithm>
#include <cmath>
#include <numeric>

namespace kerrosc {

namespace {

/// window-relative coordinate of a quasienergy within a region
double u_of(const PhasePortrait& pp, Region r, double eps)
{
    switch (r) {
        case Region::r2:
            return (eps - pp.eps_sep) / (pp.eps2 - pp.eps_sep);
        default:
            return (eps - pp.eps_sep) / (pp.eps1 - pp.eps_sep);
    }
}

} // namespace

double ClassicalBranches::branch_intensity(Region r, double eps, const PhasePortrait& pp) const
{
    const math::Pchip* itp = nullptr;
    switch (r) {
        case Region::r1: itp = &i1; break;
        case Region::r2: itp = &i2; break;
        case Region::r3:
        case Region::r3_outer: itp = &i3; break;
    }
    double u = u_of(pp, r == Region::r3_outer ? Region::r3 : r, eps);
    return (*itp)(std::clamp(u, itp->x().front(), itp->x().back()));
}

ClassicalBranches build_classical_branches(const ModelParams& params, int workers)
{
    ClassicalBranches cb;
    cb.portrait = find_stationary_points(params);
    if (!cb.portrait.bistable)
        throw Error("build_classical_branches: bistable portrait required");
    TableOptions opt;
    opt.points = 28;
    opt.workers = workers;
    opt.orbit.samples = 512;
    opt.orbit.rtol = 1e-12;
    opt.orbit.fourier_tail = 1e-8;
    for (Region r : {Region::r1, Region::r2, Region::r3}) {
        RegionTable tab = tabulate_region(params, cb.portrait, r, opt);
        std::vector<double> us(tab.eps.size());
        for (std::size_t i = 0; i < tab.eps.size(); i++)
            us[i] = u_of(cb.portrait, r, tab.eps[i]);
        // region 1's window coordinate decreases with eps; flip for pchip
        std::vector<double> iv = tab.intensity;
        if (us.front() > us.back()) {
            std::reverse(us.begin(), us.end());
            std::reverse(iv.begin(), iv.end());
        }
        math::Pchip itp(us, iv);
        if (r == Region::r1) cb.i1 = itp;
        else if (r == Region::r2) cb.i2 = itp;
        else cb.i3 = itp;
    }
    cb.band_frac = 0.2;
    return cb;
}

QuasienergySpectrum diagonalize(const ModelParams& params, int n_max,
                                const ClassicalBranches* branches)
{
    FockMatrix hc = build_hamiltonian(params, n_max);
    Eigen::MatrixXd h = hc.real();
    if (hc.imag().cwiseAbs().maxCoeff() > 1e-12 * h.cwiseAbs().maxCoeff())
        throw Error("diagonalize: Hamiltonian has unexpected imaginary entries");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw SolverError("diagonalize: eigensolver failed");

    QuasienergySpectrum sp;
    sp.params = params;
    sp.basis = es.eigenvectors();
    const Eigen::VectorXd& ev = es.eigenvalues();
    const int d = n_max + 1;

    Eigen::VectorXd nvec(d);
    for (int n = 0; n < d; n++)
        nvec(n) = n;

    ClassicalBranches local;
    const ClassicalBranches* cb = branches;
    PhasePortrait pp_here;
    if (params.drive > 0 && params.delta > 0 && params.alpha > 0) {
        try {
            pp_here = find_stationary_points(params);
            if (!pp_here.bistable)
                cb = nullptr;
            else if (!cb) {
                local = build_classical_branches(params);
                cb = &local;
            }
        } catch (const Error&) {
            cb = nullptr;  // degenerate portrait: leave labels unset
        }
    } else {
        cb = nullptr;
    }
    sp.labels_valid = (cb != nullptr);

    sp.levels.resize(d);
    for (int i = 0; i < d; i++) {
        SpectrumLevel& lev = sp.levels[i];
        lev.eps = ev(i);
        lev.mean_photon = sp.basis.col(i).cwiseAbs2().dot(nvec);
        if (!cb)
            continue;
        const PhasePortrait& pp = pp_here;
        double band = cb->band_of(pp);
        if (lev.eps <= pp.eps_sep - band) {
            lev.label = Region::r2;
            lev.weight1 = 0;
        } else if (lev.eps >= pp.eps1) {
            // the topmost region-1 state can sit slightly above the classical
            // maximum; inside the band, intensity decides against 3'
            double band1 = std::max(band, 0.6 * pp.omega1);
            double i1 = cb->branch_intensity(Region::r1, lev.eps, pp);
            double i3 = cb->branch_intensity(Region::r3, lev.eps, pp);
            if (lev.eps < pp.eps1 + band1 &&
                std::fabs(lev.mean_photon - i1) < std::fabs(lev.mean_photon - i3)) {
                lev.label = Region::r1;
                lev.weight1 = 1;
                lev.boundary = true;
            } else {
                lev.label = Region::r3_outer;
                lev.weight1 = 0;
                lev.boundary = (lev.eps < pp.eps1 + band1);
            }
        } else if (std::fabs(lev.eps - pp.eps_sep) < band) {
            lev.boundary = true;
            double best = std::numeric_limits<double>::max();
            for (Region r : {Region::r1, Region::r2, Region::r3}) {
                double di = std::fabs(cb->branch_intensity(r, lev.eps, pp) - lev.mean_photon);
                if (di < best) {
                    best = di;
                    lev.label = r;
                }
            }
            lev.weight1 = (lev.label == Region::r1) ? 1.0 : 0.0;
        } else {
            // between separatrix and eps1: regions 1 and 3 coexist; split by intensity
            double i1 = cb->branch_intensity(Region::r1, lev.eps, pp);
            double i3 = cb->branch_intensity(Region::r3, lev.eps, pp);
            double w1 = (i3 - lev.mean_photon) / (i3 - i1);
            lev.weight1 = std::clamp(w1, 0.0, 1.0);
            lev.label = (lev.weight1 >= 0.5) ? Region::r1 : Region::r3;
            lev.boundary = (lev.eps > pp.eps1 - band);
        }
    }

    double scale = std::max(std::fabs(ev(0)), std::fabs(ev(d - 1)));
    for (int i = 0; i + 1 < d; i++)
        if (std::fabs(ev(i + 1) - ev(i)) < 1e-11 * std::max(scale, 1.0))
            sp.degenerate_clusters.emplace_back(i, i + 1);
    return sp;
}

namespace {

struct TrackedSpectra {
    std::vector<Eigen::VectorXd> evals;
    std::vector<Eigen::MatrixXd> evecs;
    std::vector<std::vector<int>> track;  // track[k][curve] = eigen index at grid k
};

TrackedSpectra track_levels(const std::function<Eigen::MatrixXd(double)>& fn,
                            const std::vector<double>& grid, int workers)
{
    const std::size_t np = grid.size();
    TrackedSpectra ts;
    ts.evals.resize(np);
    ts.evecs.resize(np);
    parallel_for(np, workers, [&](std::size_t k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fn(grid[k]));
        if (es.info() != Eigen::Success)
            throw SolverError("track_levels: eigensolver failed");
        ts.evals[k] = es.eigenvalues();
        ts.evecs[k] = es.eigenvectors();
    });

    const int d = (int)ts.evals[0].size();
    ts.track.assign(np, std::vector<int>(d));
    std::iota(ts.track[0].begin(), ts.track[0].end(), 0);
    for (std::size_t k = 0; k + 1 < np; k++) {
        // assignment by maximal eigenvector overlap, greedy over descending |overlap|
        Eigen::MatrixXd ov = (ts.evecs[k].transpose() * ts.evecs[k + 1]).cwiseAbs();
        std::vector<std::tuple<double, int, int>> entries;
        entries.reserve((std::size_t)d * d);
        for (int i = 0; i < d; i++)
            for (int j = 0; j < d; j++)
                if (ov(i, j) > 0.1)
                    entries.emplace_back(ov(i, j), i, j);
        std::sort(entries.begin(), entries.end(), std::greater<>());
        std::vector<int> next_of(d, -1), used(d, 0);
        int assigned = 0;
        for (const auto& [v, i, j] : entries) {
            if (next_of[i] >= 0 || used[j])
                continue;
            next_of[i] = j;
            used[j] = 1;
            if (++assigned == d)
                break;
        }
        for (int i = 0; i < d; i++) {       // leftovers: pair unmatched in order
            if (next_of[i] >= 0)
                continue;
            for (int j = 0; j < d; j++)
                if (!used[j]) {
                    next_of[i] = j;
                    used[j] = 1;
                    break;
                }
        }
        for (int c = 0; c < d; c++)
            ts.track[k + 1][c] = next_of[ts.track[k][c]];
    }
    return ts;
}

} // namespace

ScanResult scan_gap_minima(const std::function<Eigen::MatrixXd(double)>& fn,
                           const std::vector<double>& grid, const ScanOptions& opt,
                           const std::function<bool(int, int, int)>& pair_filter)
{
    if (grid.size() < 5)
        throw Error("scan_gap_minima: need at least 5 grid points");
    TrackedSpectra ts = track_levels(fn, grid, opt.workers);
    const int d = (int)ts.evals[0].size();
    const std::size_t np = grid.size();

    auto eps_of = [&](int curve, std::size_t k) { return ts.evals[k](ts.track[k][curve]); };

    ScanResult res;
    res.delta_grid = grid;
    for (int c1 = 0; c1 < d; c1++) {
        for (int c2 = c1 + 1; c2 < d; c2++) {
            std::vector<double> gap(np);
            for (std::size_t k = 0; k < np; k++)
                gap[k] = std::fabs(eps_of(c1, k) - eps_of(c2, k));
            for (std::size_t k = 1; k + 1 < np; k++) {
                if (!(gap[k] <= gap[k - 1] && gap[k] < gap[k + 1]))
                    continue;
                if (gap[k] > opt.max_gap)
                    continue;
                int w = opt.side_offset;
                std::size_t kl = (k > (std::size_t)w) ? k - w : 0;
                std::size_t kr = std::min(np - 1, k + w);
                if (gap[k] > opt.prominence * std::min(gap[kl], gap[kr]))
                    continue;
                if (pair_filter && !pair_filter(c1, c2, (int)k))
                    continue;
                bool edge = (k == 1 || k + 2 == np);
                if (edge)
                    res.unresolved_at_edge++;
                // refine on gap^2, which is parabolic through an avoided crossing
                double x = math::parabola_vertex(grid[k - 1], gap[k - 1] * gap[k - 1], grid[k],
                                                 gap[k] * gap[k], grid[k + 1],
                                                 gap[k + 1] * gap[k + 1]);
                x = std::clamp(x, grid[k - 1], grid[k + 1]);
                // parabola value at the vertex
                double y0 = gap[k - 1] * gap[k - 1], y1 = gap[k] * gap[k],
                       y2 = gap[k + 1] * gap[k + 1];
                double l0 = (x - grid[k]) * (x - grid[k + 1]) /
                            ((grid[k - 1] - grid[k]) * (grid[k - 1] - grid[k + 1]));
                double l1 = (x - grid[k - 1]) * (x - grid[k + 1]) /
                            ((grid[k] - grid[k - 1]) * (grid[k] - grid[k + 1]));
                double l2 = (x - grid[k - 1]) * (x - grid[k]) /
                            ((grid[k + 1] - grid[k - 1]) * (grid[k + 1] - grid[k]));
                double g2 = l0 * y0 + l1 * y1 + l2 * y2;

                Anticrossing ac;
                ac.curve_a = c1;
                ac.curve_b = c2;
                ac.delta_at_min = x;
                ac.min_gap = std::sqrt(std::max(g2, 0.0));
                ac.mean_quasienergy = 0.5 * (eps_of(c1, k) + eps_of(c2, k));
                ac.at_grid_edge = edge;
                ac.grid_index = (int)k;
                if (opt.keep_traces) {
                    for (std::size_t q = 0; q < np; q++)
                        ac.trace.push_back({grid[q], gap[q],
                                            0.5 * (eps_of(c1, q) + eps_of(c2, q))});
                }
                res.anticrossings.push_back(std::move(ac));
            }
        }
    }
    return res;
}

namespace {

double mixing_angle_deg(double mean_photon, double i_low, double i_high)
{
    double w = std::clamp((i_high - mean_photon) / (i_high - i_low), 0.0, 1.0);
    return std::asin(std::sqrt(1 - w)) * 180 / M_PI;  // 0 deg = pure low-intensity state
}

} // namespace

namespace {

/// Eq.-6 style evaluation (V_high - V_low)/(I_high - I_low) over the pair of
/// vectors that best represents the diabatic region states: the raw pair when
/// it is already pure, its symmetric/antisymmetric combinations when the
/// inputs are hybridized. Optionally enforces the near-even-mixture guard on
/// the inputs.
double shift_from_pair(const ModelParams& params, const Eigen::VectorXd& vi,
                       const Eigen::VectorXd& vj, bool require_hybridized)
{
    const int d = (int)vi.size();
    Eigen::VectorXd nvec(d), vvec(d);
    for (int n = 0; n < d; n++) {
        nvec(n) = n;
        vvec(n) = params.potential((double)n);
    }
    Eigen::VectorXd up = ((vi + vj) / std::sqrt(2.0)).eval();
    Eigen::VectorXd um = ((vi - vj) / std::sqrt(2.0)).eval();
    double n_i = vi.cwiseAbs2().dot(nvec), n_j = vj.cwiseAbs2().dot(nvec);
    double n_p = up.cwiseAbs2().dot(nvec), n_m = um.cwiseAbs2().dot(nvec);

    // the more diabatic basis is the one with the wider intensity separation
    bool inputs_pure = std::fabs(n_i - n_j) > std::fabs(n_p - n_m);
    const Eigen::VectorXd& a = inputs_pure ? vi : up;
    const Eigen::VectorXd& b = inputs_pure ? vj : um;
    double ia = inputs_pure ? n_i : n_p, ib = inputs_pure ? n_j : n_m;
    const Eigen::VectorXd& low = (ia <= ib) ? a : b;
    const Eigen::VectorXd& high = (ia <= ib) ? b : a;
    double i1 = std::min(ia, ib), i3 = std::max(ia, ib);

    if (require_hybridized) {
        double ang_i = mixing_angle_deg(n_i, i1, i3);
        double ang_j = mixing_angle_deg(n_j, i1, i3);
        if (inputs_pure || std::fabs(ang_i - 45) > 10 || std::fabs(ang_j - 45) > 10)
            throw Error("predict_shift: hybridization too far from an even mixture "
                        "(diabatic basis recovery invalid)");
    }
    if (i3 - i1 == 0)
        throw Error("predict_shift: degenerate intensities");
    double v1 = low.cwiseAbs2().dot(vvec), v3 = high.cwiseAbs2().dot(vvec);
    return (v3 - v1) / (i3 - i1);
}

} // namespace

double predict_shift_from_vectors(const ModelParams& params, const Eigen::VectorXd& vi,
                                  const Eigen::VectorXd& vj)
{
    return shift_from_pair(params, vi, vj, true);
}

double predict_shift(const ModelParams& params, int n_max, double delta0, int level_i,
                     int level_j)
{
    ModelParams kerr = params.without_potential();
    kerr.delta = delta0;
    Eigen::MatrixXd h = build_hamiltonian(kerr, n_max).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw SolverError("predict_shift: eigensolver failed");
    return predict_shift_from_vectors(params, es.eigenvectors().col(level_i),
                                      es.eigenvectors().col(level_j));
}

ScanResult scan_anticrossings(const ModelParams& params_base,
                              const std::vector<double>& delta_grid, const ScanOptions& opt)
{
    int n_max = opt.n_max;
    if (n_max <= 0) {
        ModelParams p = params_base;
        p.delta = *std::max_element(delta_grid.begin(), delta_grid.end());
        n_max = p.default_n_max();
    }
    auto matrix_of = [&](double delta) {
        ModelParams p = params_base;
        p.delta = delta;
        return Eigen::MatrixXd(build_hamiltonian(p, n_max).real());
    };

    // labels per grid point, evaluated lazily from cached spectra
    const std::size_t np = delta_grid.size();
    std::vector<QuasienergySpectrum> spectra(np);
    std::vector<char> have(np, 0);
    auto spectrum_at = [&](std::size_t k) -> const QuasienergySpectrum& {
        if (!have[k]) {
            ModelParams p = params_base;
            p.delta = delta_grid[k];
            spectra[k] = diagonalize(p, n_max);
            have[k] = 1;
        }
        return spectra[k];
    };

    TrackedSpectra ts = track_levels(matrix_of, delta_grid, opt.workers);

    auto pair_filter = [&](int c1, int c2, int k) {
        if (!opt.require_13)
            return true;
        // the adiabatic curves exchange character through the minimum; require
        // a {1,3} label pair on both sides
        int w = opt.side_offset;
        std::size_t kl = (k > w) ? k - w : 0;
        std::size_t kr = std::min(np - 1, (std::size_t)k + w);
        for (std::size_t q : {kl, kr}) {
            const QuasienergySpectrum& sp = spectrum_at(q);
            if (!sp.labels_valid)
                return false;
            Region la = sp.levels[ts.track[q][c1]].label;
            Region lb = sp.levels[ts.track[q][c2]].label;
            bool ok = (la == Region::r1 && lb == Region::r3) ||
                      (la == Region::r3 && lb == Region::r1);
            if (!ok)
                return false;
        }
        return true;
    };

    ScanResult res = scan_gap_minima(matrix_of, delta_grid, opt, pair_filter);

    for (Anticrossing& ac : res.anticrossings) {
        std::size_t k = (std::size_t)ac.grid_index;
        const QuasienergySpectrum& sp = spectrum_at(k);
        int ia = ts.track[k][ac.curve_a], ib = ts.track[k][ac.curve_b];
        ac.mean_photon_a = sp.levels[ia].mean_photon;
        ac.mean_photon_b = sp.levels[ib].mean_photon;
        ModelParams p = params_base;
        p.delta = delta_grid[k];
        try {
            ac.predicted_shift = shift_from_pair(p, sp.basis.col(ia), sp.basis.col(ib), false);
        } catch (const Error&) {
            ac.predicted_shift = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return res;
}

} // namespace kerrosc
