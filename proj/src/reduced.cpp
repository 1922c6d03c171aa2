#include "kerrosc/reduced.hpp"
#include "kerrosc/errors.hpp"
#include <algorithm>
#include <cmath>

namespace kerrosc {

namespace {

/// Linear interpolation of the k-th orbit harmonic across a region table
/// (zero where the stored spectra have no support).
double harmonic_value(const RegionTable& tab, int k, double eps)
{
    const auto& xs = tab.eps;
    if (eps <= xs.front())
        return tab.orbits.front().harmonic(k);
    if (eps >= xs.back())
        return tab.orbits.back().harmonic(k);
    auto it = std::upper_bound(xs.begin(), xs.end(), eps);
    std::size_t i = (it - xs.begin()) - 1;
    double w = (eps - xs[i]) / (xs[i + 1] - xs[i]);
    return (1 - w) * tab.orbits[i].harmonic(k) + w * tab.orbits[i + 1].harmonic(k);
}

double intensity_value(const RegionTable& tab, double eps)
{
    double lo = tab.eps.front(), hi = tab.eps.back();
    return tab.intensity_itp(std::clamp(eps, lo, hi));
}

} // namespace

ReducedModel build_reduced_generator(const ModelParams& params, const PhasePortrait& pp,
                                     const RegionTable& table1, const RegionTable& table2,
                                     const RegionTable& table3, const ReducedOptions& opt)
{
    ReducedModel model;
    model.params = params;

    // Bohr-Sommerfeld ladders, quasienergy-ascending within each region
    std::vector<std::vector<int>> ladder(3);
    auto add_levels = [&](Region r, const RegionTable& tab) {
        auto levels = bohr_sommerfeld_levels(params, pp, r, &tab);
        int idx = 0;
        for (const auto& lev : levels) {
            ReducedLevel rl;
            rl.region = r;
            rl.region_idx = idx++;
            rl.bohr_n = lev.n;
            rl.eps = lev.eps;
            ladder[(int)r - 1].push_back((int)model.levels.size());
            model.levels.push_back(rl);
        }
    };
    add_levels(Region::r1, table1);
    add_levels(Region::r2, table2);
    add_levels(Region::r3, table3);

    const std::size_t nl = model.levels.size();
    if (nl == 0)
        throw Error("build_reduced_generator: no quantized levels in any region");

    // pair region-1 levels with the nearest region-3 level (within half the
    // smaller local spacing); leftover levels carry no tunneling term
    const auto& lad1 = ladder[0];
    const auto& lad3 = ladder[2];
    std::vector<int> partner_of_l3(lad3.size(), -1);
    for (std::size_t i1 = 0; i1 < lad1.size(); i1++) {
        double e1 = model.levels[lad1[i1]].eps;
        double best = std::numeric_limits<double>::max();
        int jbest = -1;
        for (std::size_t j = 0; j < lad3.size(); j++) {
            if (partner_of_l3[j] >= 0)
                continue;
            double d = std::fabs(model.levels[lad3[j]].eps - e1);
            if (d < best) {
                best = d;
                jbest = (int)j;
            }
        }
        if (jbest < 0)
            continue;
        double spacing1 = 2 * M_PI / table1.period_itp(std::clamp(
                                          e1, table1.eps.front(), table1.eps.back()));
        double e3 = model.levels[lad3[jbest]].eps;
        double spacing3 = 2 * M_PI / table3.period_itp(std::clamp(
                                          e3, table3.eps.front(), table3.eps.back()));
        if (best > 0.5 * std::min(spacing1, spacing3)) {
            model.unpaired_region1++;
            continue;
        }
        partner_of_l3[jbest] = (int)i1;
        ReducedPair pr;
        pr.level1 = lad1[i1];
        pr.level3 = lad3[jbest];
        double ebar = 0.5 * (e1 + e3);
        pr.mismatch = e1 - e3;
        pr.t = (ebar > pp.eps_sep && ebar < pp.eps1)
                   ? tunneling_amplitude(params, pp, ebar, opt.prefactor)
                   : 0.0;
        model.pairs.push_back(pr);
    }
    for (int p : partner_of_l3)
        if (p < 0)
            model.unpaired_region3++;

    const std::size_t np = model.pairs.size();
    const std::size_t dim = nl + 2 * np;
    model.generator = Eigen::MatrixXd::Zero(dim, dim);
    model.rate_matrix = Eigen::MatrixXd::Zero(nl, nl);
    Eigen::MatrixXd& gen = model.generator;

    const double g_down = params.gamma * (params.n_thermal + 1);
    const double g_up = params.gamma * params.n_thermal;

    auto table_of = [&](Region r) -> const RegionTable& {
        return (r == Region::r1) ? table1 : (r == Region::r2) ? table2 : table3;
    };

    // intra-region rates from the harmonic dictionary, pairwise conservative:
    // moving down the ladder probes the +k harmonic, moving up the -k one
    auto add_rate = [&](int from, int to, double rate) {
        if (rate <= 0)
            return;
        model.rate_matrix(to, from) += rate;
        model.rate_matrix(from, from) -= rate;
        gen(to, from) += rate;
        gen(from, from) -= rate;
    };

    for (int reg = 0; reg < 3; reg++) {
        const auto& lad = ladder[reg];
        const RegionTable& tab = table_of((Region)(reg + 1));
        for (std::size_t iu = 0; iu < lad.size(); iu++) {
            for (std::size_t il = 0; il < iu; il++) {
                int k = (int)(iu - il);
                if (k > opt.max_harmonic)
                    continue;
                int u = lad[iu], l = lad[il];
                double ebar = 0.5 * (model.levels[u].eps + model.levels[l].eps);
                double a_down = harmonic_value(tab, +k, ebar);
                double a_up = harmonic_value(tab, -k, ebar);
                // rate(u->l): emission via a_{+k}, absorption via a_{-k}
                add_rate(u, l, g_down * a_down * a_down + g_up * a_up * a_up);
                add_rate(l, u, g_down * a_up * a_up + g_up * a_down * a_down);
            }
        }
    }

    // separatrix junction: symmetric exchange between the boundary levels of
    // the three ladders (discrete analog of per-state continuity at eps_sep)
    if (opt.junction && params.gamma > 0) {
        auto boundary_level = [&](int reg) -> int {
            const auto& lad = ladder[reg];
            if (lad.empty())
                return -1;
            // region 2's ladder ends at the separatrix from below, 1 and 3 from above
            return (reg == 1) ? lad.back() : lad.front();
        };
        // nearest-neighbour rate scale from the dictionary itself, so a
        // single-level region still couples through the separatrix
        auto near_rate = [&](int lev) {
            const RegionTable& tab = table_of(model.levels[lev].region);
            double e = model.levels[lev].eps;
            double h = std::max(std::fabs(harmonic_value(tab, 1, e)),
                                std::fabs(harmonic_value(tab, -1, e)));
            return g_down * h * h;
        };
        int b1 = boundary_level(0), b2 = boundary_level(1), b3 = boundary_level(2);
        for (auto [x, y] : {std::pair{b2, b1}, {b2, b3}, {b1, b3}}) {
            if (x < 0 || y < 0)
                continue;
            double r = opt.junction_boost * std::sqrt(near_rate(x) * near_rate(y));
            add_rate(x, y, r);
            add_rate(y, x, r);
        }
    }

    // tunneling terms: d rho_l1/dt += -2 t Im rho13, d rho_l3/dt += +2 t Im rho13
    for (std::size_t p = 0; p < np; p++) {
        const ReducedPair& pr = model.pairs[p];
        std::size_t i_im = nl + 2 * p + 1;
        gen(pr.level1, i_im) -= 2 * pr.t;
        gen(pr.level3, i_im) += 2 * pr.t;
    }

    // coherence rows: d rho13/dt = -i mismatch rho13 + i t (rho1 - rho3) - damping
    // with real dictionary coefficients the damping acts identically on the
    // real and imaginary parts
    for (std::size_t p = 0; p < np; p++) {
        const ReducedPair& pr = model.pairs[p];
        std::size_t i_re = nl + 2 * p, i_im = nl + 2 * p + 1;
        // -i mismatch rho13: d(Re)/dt = +mismatch Im, d(Im)/dt = -mismatch Re
        gen(i_re, i_im) += pr.mismatch;
        gen(i_im, i_re) -= pr.mismatch;
        // +i t (rho1 - rho3) feeds the imaginary part
        gen(i_im, pr.level1) += pr.t;
        gen(i_im, pr.level3) -= pr.t;

        double e1 = model.levels[pr.level1].eps, e3 = model.levels[pr.level3].eps;
        double i1 = intensity_value(table1, e1), i3 = intensity_value(table3, e3);
        double local = 0.5 * g_down * (i1 + i3) + 0.5 * g_up * (i1 + i3 + 2);
        gen(i_re, i_re) -= local;
        gen(i_im, i_im) -= local;

        double transfer_sum = 0;
        for (std::size_t p2 = 0; p2 < np; p2++) {
            const ReducedPair& qr = model.pairs[p2];
            int k1 = model.levels[qr.level1].region_idx - model.levels[pr.level1].region_idx;
            int k3 = model.levels[qr.level3].region_idx - model.levels[pr.level3].region_idx;
            if (std::abs(k1) > opt.max_harmonic || std::abs(k3) > opt.max_harmonic)
                continue;
            double eb1 = 0.5 * (e1 + model.levels[qr.level1].eps);
            double eb3 = 0.5 * (e3 + model.levels[qr.level3].eps);
            // emission-type transfer pairs a(+k) elements, absorption-type a(-k)
            double c = g_down * harmonic_value(table1, k1, eb1) * harmonic_value(table3, k3, eb3) +
                       g_up * harmonic_value(table1, -k1, eb1) * harmonic_value(table3, -k3, eb3);
            std::size_t j_re = nl + 2 * p2, j_im = nl + 2 * p2 + 1;
            gen(i_re, j_re) += c;
            gen(i_im, j_im) += c;
            transfer_sum += c;
        }
        model.pairs[p].gamma_eff = 2 * (local - transfer_sum);
    }
    return model;
}

namespace {

ReducedSolution finish_solution(const ReducedModel& model, const Eigen::VectorXd& state,
                                bool has_coherence)
{
    const std::size_t nl = model.levels.size(), np = model.pairs.size();
    ReducedSolution sol;
    sol.populations = state.head(nl);
    sol.coherence.assign(np, {0, 0});
    sol.pair_current.assign(np, 0.0);
    for (std::size_t p = 0; p < np; p++) {
        const ReducedPair& pr = model.pairs[p];
        if (has_coherence) {
            sol.coherence[p] = {state(nl + 2 * p), state(nl + 2 * p + 1)};
            sol.pair_current[p] = 2 * pr.t * sol.coherence[p].imag();
        } else {
            double lam = pr.gamma_eff * pr.t * pr.t /
                         (pr.mismatch * pr.mismatch + 0.25 * pr.gamma_eff * pr.gamma_eff);
            sol.pair_current[p] = lam * (sol.populations(pr.level1) - sol.populations(pr.level3));
        }
    }
    for (std::size_t i = 0; i < nl; i++) {
        double v = sol.populations(i);
        switch (model.levels[i].region) {
            case Region::r1: sol.p1 += v; break;
            case Region::r2: sol.p2 += v; break;
            default: sol.p3 += v; break;
        }
    }
    return sol;
}

Eigen::VectorXd solve_with_normalization(Eigen::MatrixXd sys, std::size_t n_prob)
{
    const std::size_t dim = sys.rows();
    // replace the first population equation with sum(populations) = 1
    for (std::size_t c = 0; c < dim; c++)
        sys(0, c) = (c < n_prob) ? 1.0 : 0.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    rhs(0) = 1;
    // scales in the system span many orders (tunneling elements vs weak
    // rates); judge the solve by its residual, not by a rank threshold
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    Eigen::VectorXd x = lu.solve(rhs);
    double scale = sys.cwiseAbs().maxCoeff();
    double res = (sys * x - rhs).norm() / (scale * x.norm() + 1.0);
    if (!std::isfinite(res) || res > 1e-8)
        throw SolverError("reduced steady state: singular stationary system", lu.rcond());
    return x;
}

} // namespace

ReducedSolution reduced_steady_state(const ReducedModel& model)
{
    if (!(model.params.gamma > 0))
        throw Error("reduced_steady_state: gamma > 0 required");
    Eigen::VectorXd x = solve_with_normalization(model.generator, model.levels.size());
    return finish_solution(model, x, true);
}

ReducedSolution reduced_steady_state_eliminated(const ReducedModel& model)
{
    if (!(model.params.gamma > 0))
        throw Error("reduced_steady_state_eliminated: gamma > 0 required");
    const std::size_t nl = model.levels.size();
    Eigen::MatrixXd sys = model.rate_matrix;
    for (const ReducedPair& pr : model.pairs) {
        double lam = pr.gamma_eff * pr.t * pr.t /
                     (pr.mismatch * pr.mismatch + 0.25 * pr.gamma_eff * pr.gamma_eff);
        if (!(lam > 0))
            continue;
        sys(pr.level1, pr.level1) -= lam;
        sys(pr.level1, pr.level3) += lam;
        sys(pr.level3, pr.level3) -= lam;
        sys(pr.level3, pr.level1) += lam;
    }
    Eigen::VectorXd x = solve_with_normalization(sys, nl);
    return finish_solution(model, x, false);
}

} // namespace kerrosc
