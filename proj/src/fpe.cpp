#include "kerrosc/fpe.hpp"
#include "kerrosc/errors.hpp"
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

namespace kerrosc {

namespace {

/// Shared window grid over (eps_sep, eps1) with eps_crit/eps_res inserted and
/// per-node coefficients for both regions.
struct WindowGrid {
    std::vector<double> eps, k1, d1, t1, k3, d3, t3, lambda;
    std::size_t i_crit = 0;                       ///< first node index > eps_crit boundary
    std::ptrdiff_t i_res = -1;                    ///< node index of eps_res, -1 if none
};

WindowGrid build_window_grid(const TunnelProfile& prof)
{
    WindowGrid wg;
    std::vector<double> xs = prof.eps;
    const double span = xs.back() - xs.front();
    auto insert_pt = [&](double x) {
        for (double v : xs)
            if (std::fabs(v - x) < 1e-10 * span)
                return;
        xs.insert(std::upper_bound(xs.begin(), xs.end(), x), x);
    };
    if (!prof.whole_window_strong && prof.eps_crit > xs.front() && prof.eps_crit < xs.back())
        insert_pt(prof.eps_crit);
    if (prof.eps_res && *prof.eps_res > xs.front() && *prof.eps_res < xs.back())
        insert_pt(*prof.eps_res);

    math::Pchip k1i(prof.eps, prof.k1), d1i(prof.eps, prof.d1), t1i(prof.eps, prof.t1);
    math::Pchip k3i(prof.eps, prof.k3), d3i(prof.eps, prof.d3), t3i(prof.eps, prof.t3);
    math::Pchip ti(prof.eps, prof.t), mi(prof.eps, prof.mismatch), gi(prof.eps, prof.gamma13);

    wg.eps = xs;
    const std::size_t n = xs.size();
    wg.k1.resize(n); wg.d1.resize(n); wg.t1.resize(n);
    wg.k3.resize(n); wg.d3.resize(n); wg.t3.resize(n);
    wg.lambda.resize(n);
    for (std::size_t i = 0; i < n; i++) {
        double e = xs[i];
        wg.k1[i] = k1i(e); wg.d1[i] = d1i(e); wg.t1[i] = t1i(e);
        wg.k3[i] = k3i(e); wg.d3[i] = d3i(e); wg.t3[i] = t3i(e);
        if (e <= prof.eps_crit) {
            double t = ti(e), m = mi(e), g = gi(e);
            double den = m * m + 0.25 * g * g;
            wg.lambda[i] = (den > 0) ? g * t * t / den : 0;
        } else {
            wg.lambda[i] = 0;
        }
    }
    wg.i_crit = n;
    for (std::size_t i = 0; i < n; i++)
        if (xs[i] > prof.eps_crit) {
            wg.i_crit = i;
            break;
        }
    if (prof.eps_res) {
        for (std::size_t i = 0; i < n; i++)
            if (std::fabs(xs[i] - *prof.eps_res) < 1e-9 * span)
                wg.i_res = (std::ptrdiff_t)i;
    }
    return wg;
}

/// Region-3 tail nodes above the window, bridged from the window's last node.
struct Tail {
    std::vector<double> eps, k, d, t;
};

Tail build_tail(const WindowGrid& wg, const RegionTable& region3)
{
    Tail tl;
    double top = wg.eps.back();
    tl.eps.push_back(top);
    tl.k.push_back(wg.k3.back());
    tl.d.push_back(wg.d3.back());
    tl.t.push_back(wg.t3.back());
    for (std::size_t i = 0; i < region3.eps.size(); i++) {
        if (region3.eps[i] <= top)
            continue;
        tl.eps.push_back(region3.eps[i]);
        tl.k.push_back(region3.drift[i]);
        tl.d.push_back(region3.diffusion[i]);
        tl.t.push_back(region3.period[i]);
    }
    return tl;
}

void clip_negative(std::vector<double>& p, const std::vector<double>& t,
                   const std::vector<double>& eps, double total_mass, double tol,
                   double& clipped)
{
    double neg = 0;
    for (std::size_t i = 0; i < p.size(); i++)
        if (p[i] < 0) {
            double w = (i == 0 ? eps[1] - eps[0]
                               : (i + 1 == p.size() ? eps[i] - eps[i - 1]
                                                    : 0.5 * (eps[i + 1] - eps[i - 1])));
            neg += -p[i] * t[i] * w / (2 * M_PI);
        }
    if (neg > tol * std::max(total_mass, 1e-300))
        throw SolverError("stationary distribution: negative probability beyond clip tolerance",
                          neg);
    clipped += neg;
    for (double& v : p)
        v = std::max(v, 0.0);
}

double mass_of(const std::vector<double>& eps, const std::vector<double>& p,
               const std::vector<double>& t)
{
    std::vector<double> f(p.size());
    for (std::size_t i = 0; i < p.size(); i++)
        f[i] = p[i] * t[i] / (2 * M_PI);
    return math::trapezoid(eps, f);
}

} // namespace

StationaryDistribution stationary_solution(const ModelParams& params, const PhasePortrait& pp,
                                           const TunnelProfile& prof, const RegionTable& region2,
                                           const RegionTable& region3, const FpeOptions& opt)
{
    if (!(params.gamma > 0))
        throw Error("stationary_solution: gamma > 0 required");
    if (!pp.bistable)
        throw Error("stationary_solution: bistable portrait required");
    const double goq = 1.0 / (params.n_thermal + 0.5);  // gamma / Q

    WindowGrid wg = build_window_grid(prof);
    Tail tl = build_tail(wg, region3);
    const std::size_t n = wg.eps.size();

    StationaryDistribution dist;
    dist.eps_crit = prof.eps_crit;
    dist.eps_res = prof.eps_res;
    dist.eps13 = wg.eps;
    dist.t1 = wg.t1;
    dist.t3 = wg.t3;
    dist.p1.assign(n, 0.0);
    dist.p3.assign(n, 0.0);

    // combined-coefficient exponent on the equilibrated stretch
    std::vector<double> ratio_comb(n);
    for (std::size_t i = 0; i < n; i++)
        ratio_comb[i] = (wg.k1[i] + wg.k3[i]) / (wg.d1[i] + wg.d3[i]);
    std::vector<double> s_comb = math::cumulative_trapezoid(wg.eps, ratio_comb);

    const std::size_t ic = std::min(wg.i_crit, n);  // nodes [0, ic) are below eps_crit
    for (std::size_t i = 0; i < ic; i++) {
        double v = std::exp(-goq * s_comb[i]);
        dist.p1[i] = dist.p3[i] = v;
    }
    const double p_crit = (ic > 0) ? dist.p1[ic - 1] : 1.0;

    // integrating-factor recurrences above eps_crit
    auto run_branch = [&](const std::vector<double>& k, const std::vector<double>& d,
                          std::vector<double>& p, double c_over_q, std::size_t from,
                          std::size_t to, double p_from) {
        // solves gamma K P + Q D P' = c with P(eps_from) = p_from
        p[from] = p_from;
        double e_acc = p_from, i_acc = 0;
        for (std::size_t j = from; j + 1 <= to; j++) {
            double h = wg.eps[j + 1] - wg.eps[j];
            double r0 = k[j] / d[j], r1 = k[j + 1] / d[j + 1];
            double ds = 0.5 * (r0 + r1) * h;
            double w = std::exp(-goq * ds);
            i_acc = i_acc * w + 0.5 * h * ((1.0 / d[j]) * w + 1.0 / d[j + 1]);
            e_acc = e_acc * w;
            p[j + 1] = e_acc + c_over_q * i_acc;
        }
    };

    dist.flow_j = 0;
    if (ic < n) {
        std::size_t i0 = (ic > 0) ? ic - 1 : 0;  // index of the eps_crit node
        if (prof.eps_res && wg.i_res > (std::ptrdiff_t)i0) {
            std::size_t ir = (std::size_t)wg.i_res;
            // flow branch coefficients at eps_res via the same recurrences with J = 0/1
            std::vector<double> e1(n, 0.0), e3(n, 0.0), w1(n, 0.0), w3(n, 0.0);
            run_branch(wg.k1, wg.d1, e1, 0.0, i0, ir, 1.0);   // E_1
            run_branch(wg.k3, wg.d3, e3, 0.0, i0, ir, 1.0);   // E_3
            run_branch(wg.k1, wg.d1, w1, 1.0, i0, ir, 0.0);   // unit-c response, region 1
            run_branch(wg.k3, wg.d3, w3, 1.0, i0, ir, 0.0);   // unit-c response, region 3
            const double gt = prof.res_gamma, tt = prof.res_t, dm = prof.res_mismatch;
            const double q = params.noise_q();
            double denom = dm * dm + 0.25 * gt * gt +
                           (gt * tt * tt / q) * (w1[ir] + w3[ir]);
            double j_flow =
                (denom > 0) ? gt * tt * tt * p_crit * (e1[ir] - e3[ir]) / denom : 0.0;
            dist.flow_j = j_flow;
            const double q_inv_j = j_flow / q;
            for (std::size_t i = i0; i <= ir; i++) {
                dist.p1[i] = p_crit * e1[i] - q_inv_j * w1[i];
                dist.p3[i] = p_crit * e3[i] + q_inv_j * w3[i];
            }
            // zero-flow continuation above eps_res
            std::vector<double> z1(n, 0.0), z3(n, 0.0);
            run_branch(wg.k1, wg.d1, z1, 0.0, ir, n - 1, dist.p1[ir]);
            run_branch(wg.k3, wg.d3, z3, 0.0, ir, n - 1, dist.p3[ir]);
            for (std::size_t i = ir; i < n; i++) {
                dist.p1[i] = z1[i];
                dist.p3[i] = z3[i];
            }
        } else {
            // no resonant pair: zero-flow branches from eps_crit
            std::vector<double> z1(n, 0.0), z3(n, 0.0);
            run_branch(wg.k1, wg.d1, z1, 0.0, i0, n - 1, p_crit);
            run_branch(wg.k3, wg.d3, z3, 0.0, i0, n - 1, p_crit);
            for (std::size_t i = i0; i < n; i++) {
                dist.p1[i] = z1[i];
                dist.p3[i] = z3[i];
            }
        }
    }

    // region-3 tail above the window: zero-flow continuation
    dist.eps3t = tl.eps;
    dist.t3t = tl.t;
    dist.p3t.assign(tl.eps.size(), 0.0);
    {
        std::vector<double> ratio(tl.eps.size());
        for (std::size_t i = 0; i < tl.eps.size(); i++)
            ratio[i] = tl.k[i] / tl.d[i];
        std::vector<double> s = math::cumulative_trapezoid(tl.eps, ratio);
        for (std::size_t i = 0; i < tl.eps.size(); i++)
            dist.p3t[i] = dist.p3.back() * std::exp(-goq * s[i]);
    }

    // region 2: zero-flow solution anchored at the separatrix end
    dist.eps2 = region2.eps;
    dist.t2 = region2.period;
    dist.p2.assign(region2.eps.size(), 0.0);
    {
        std::vector<double> ratio(region2.eps.size());
        for (std::size_t i = 0; i < region2.eps.size(); i++)
            ratio[i] = region2.drift[i] / region2.diffusion[i];
        std::vector<double> s = math::cumulative_trapezoid(region2.eps, ratio);
        double s_top = s.back();
        for (std::size_t i = 0; i < region2.eps.size(); i++)
            dist.p2[i] = std::exp(-goq * (s[i] - s_top));
    }

    // clip quadrature-noise negatives, then normalize
    double m1 = mass_of(dist.eps13, dist.p1, dist.t1);
    double m2 = mass_of(dist.eps2, dist.p2, dist.t2);
    double m3 = mass_of(dist.eps13, dist.p3, dist.t3) + mass_of(dist.eps3t, dist.p3t, dist.t3t);
    double total = m1 + m2 + m3;
    dist.negative_mass_clipped = 0;
    clip_negative(dist.p1, dist.t1, dist.eps13, total, opt.clip_tolerance,
                  dist.negative_mass_clipped);
    clip_negative(dist.p3, dist.t3, dist.eps13, total, opt.clip_tolerance,
                  dist.negative_mass_clipped);
    clip_negative(dist.p3t, dist.t3t, dist.eps3t, total, opt.clip_tolerance,
                  dist.negative_mass_clipped);

    m1 = mass_of(dist.eps13, dist.p1, dist.t1);
    m2 = mass_of(dist.eps2, dist.p2, dist.t2);
    m3 = mass_of(dist.eps13, dist.p3, dist.t3) + mass_of(dist.eps3t, dist.p3t, dist.t3t);
    total = m1 + m2 + m3;
    if (!(total > 0) || !std::isfinite(total))
        throw SolverError("stationary_solution: non-finite probability mass", total);
    dist.raw_mass = total;
    for (auto* v : {&dist.p1, &dist.p2, &dist.p3, &dist.p3t})
        for (double& x : *v)
            x /= total;
    dist.flow_j /= total;
    dist.occ1 = m1 / total;
    dist.occ2 = m2 / total;
    dist.occ3 = m3 / total;
    return dist;
}

namespace {

/// Bernoulli function z / (e^z - 1), stable near zero.
double bernoulli_fn(double z)
{
    if (std::fabs(z) < 1e-5)
        return 1.0 - 0.5 * z + z * z / 12.0;
    return z / std::expm1(z);
}

} // namespace

StationaryDistribution bvp_cross_check(const ModelParams& params, const PhasePortrait& pp,
                                       const TunnelProfile& prof, const RegionTable& region2,
                                       const RegionTable& region3, const FpeOptions& opt)
{
    if (!(params.gamma > 0))
        throw Error("bvp_cross_check: gamma > 0 required");
    const double q = params.noise_q();
    const double gam = params.gamma;

    WindowGrid wg = build_window_grid(prof);
    Tail tl = build_tail(wg, region3);
    const std::size_t n2 = region2.eps.size();
    const std::size_t nw = wg.eps.size();
    const std::size_t nt = tl.eps.size() - 1;  // first tail node duplicates the window top

    // Below eps_crit the piecewise model has P1 = P3, carried as one combined
    // unknown per node (the smooth-lambda mode keeps all nodes separate and
    // couples them through the Lorentzian rate instead).
    const std::size_t nc = opt.smooth_lambda ? 0 : std::min(wg.i_crit, nw);
    const std::size_t ns = nw - nc;

    // unknown layout: [region2 | junction | combined | P1 sep | P3 sep | tail]
    const std::size_t i_junction = n2;
    const std::size_t i_comb = n2 + 1;
    const std::size_t i_p1 = i_comb + nc;
    const std::size_t i_p3 = i_p1 + ns;
    const std::size_t i_tail = i_p3 + ns;
    const std::size_t ntot = i_tail + nt;
    const std::size_t npos = (std::size_t)-1;

    auto idx_p1_any = [&](std::size_t j) { return j < nc ? i_comb + j : i_p1 + (j - nc); };
    auto idx_p3_any = [&](std::size_t j) { return j < nc ? i_comb + j : i_p3 + (j - nc); };

    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](std::size_t r, std::size_t c, double v) {
        if (v != 0)
            trip.emplace_back((int)r, (int)c, v);
    };

    // Scharfetter-Gummel flux F = gamma K P + Q D dP/de between two nodes,
    // exact for constant coefficients on the face.
    struct FaceC {
        double c_left, c_right;
    };
    auto sg = [&](double e0, double e1, double k_mid, double d_mid) -> FaceC {
        double h = e1 - e0;
        double z = gam * k_mid * h / (q * d_mid);
        return {-(q * d_mid / h) * bernoulli_fn(z), (q * d_mid / h) * bernoulli_fn(-z)};
    };

    // every face connects two unknowns; assembling +F into the left node's
    // equation and -F into the right node's keeps conservation exact
    auto wire = [&](std::size_t row_l, std::size_t row_r, std::size_t col_l, std::size_t col_r,
                    const FaceC& f) {
        if (row_l != npos) {
            add(row_l, col_l, f.c_left);
            add(row_l, col_r, f.c_right);
        }
        if (row_r != npos) {
            add(row_r, col_l, -f.c_left);
            add(row_r, col_r, -f.c_right);
        }
    };

    const double eps_sep = pp.eps_sep;
    math::Pchip k2i(region2.eps, region2.drift), d2i(region2.eps, region2.diffusion);

    // region 2 internal faces and the face to the junction
    for (std::size_t j = 0; j + 1 < n2; j++) {
        double em = 0.5 * (region2.eps[j] + region2.eps[j + 1]);
        wire(j, j + 1, j, j + 1, sg(region2.eps[j], region2.eps[j + 1], k2i(em), d2i(em)));
    }
    wire(n2 - 1, i_junction, n2 - 1, i_junction,
         sg(region2.eps[n2 - 1], eps_sep, region2.drift[n2 - 1], region2.diffusion[n2 - 1]));

    // junction to the first window node
    if (nc > 0) {
        wire(i_junction, i_comb, i_junction, i_comb,
             sg(eps_sep, wg.eps[0], wg.k1[0] + wg.k3[0], wg.d1[0] + wg.d3[0]));
    } else {
        wire(i_junction, i_p1, i_junction, i_p1, sg(eps_sep, wg.eps[0], wg.k1[0], wg.d1[0]));
        wire(i_junction, i_p3, i_junction, i_p3, sg(eps_sep, wg.eps[0], wg.k3[0], wg.d3[0]));
    }

    // window interval faces
    for (std::size_t j = 0; j + 1 < nw; j++) {
        double e0 = wg.eps[j], e1 = wg.eps[j + 1];
        double k1m = 0.5 * (wg.k1[j] + wg.k1[j + 1]), d1m = 0.5 * (wg.d1[j] + wg.d1[j + 1]);
        double k3m = 0.5 * (wg.k3[j] + wg.k3[j + 1]), d3m = 0.5 * (wg.d3[j] + wg.d3[j + 1]);
        if (j + 1 < nc) {
            wire(i_comb + j, i_comb + j + 1, i_comb + j, i_comb + j + 1,
                 sg(e0, e1, k1m + k3m, d1m + d3m));
        } else {
            wire(idx_p1_any(j), idx_p1_any(j + 1), idx_p1_any(j), idx_p1_any(j + 1),
                 sg(e0, e1, k1m, d1m));
            wire(idx_p3_any(j), idx_p3_any(j + 1), idx_p3_any(j), idx_p3_any(j + 1),
                 sg(e0, e1, k3m, d3m));
        }
    }
    // region 1 has zero flux at eps1 (no face); region 3 continues into the tail
    std::vector<FaceC> ft(nt);
    for (std::size_t j = 0; j < nt; j++)
        ft[j] = sg(tl.eps[j], tl.eps[j + 1], 0.5 * (tl.k[j] + tl.k[j + 1]),
                   0.5 * (tl.d[j] + tl.d[j + 1]));
    if (nt > 0)
        wire(idx_p3_any(nw - 1), i_tail, idx_p3_any(nw - 1), i_tail, ft[0]);
    for (std::size_t j = 0; j + 1 < nt; j++)
        wire(i_tail + j, i_tail + j + 1, i_tail + j, i_tail + j + 1, ft[j + 1]);

    auto cell_width = [&](const std::vector<double>& xs, std::size_t j, double left_edge) {
        double lo = (j == 0) ? 0.5 * (left_edge + xs[0]) : 0.5 * (xs[j - 1] + xs[j]);
        double hi = (j + 1 < xs.size()) ? 0.5 * (xs[j] + xs[j + 1]) : xs[j];
        return hi - lo;
    };

    // tunneling sources
    for (std::size_t j = nc; j < nw; j++) {
        std::size_t r1 = i_p1 + (j - nc), r3 = i_p3 + (j - nc);
        double c = 0;
        if (opt.smooth_lambda && wg.lambda[j] > 0)
            c += wg.t1[j] * wg.lambda[j] * cell_width(wg.eps, j, eps_sep);
        if (wg.i_res == (std::ptrdiff_t)j && prof.res_weight > 0)
            c += prof.res_weight;  // point source, no cell width
        if (c > 0) {
            add(r1, i_p3 + (j - nc), c);
            add(r1, i_p1 + (j - nc), -c);
            add(r3, i_p1 + (j - nc), c);
            add(r3, i_p3 + (j - nc), -c);
        }
    }

    // replace the outermost equation with the normalization sum P T w / 2pi = 1
    std::size_t norm_row = (nt > 0) ? i_tail + nt - 1
                                    : (ns > 0 ? i_p3 + ns - 1 : i_comb + nc - 1);
    trip.erase(std::remove_if(trip.begin(), trip.end(),
                              [&](const Eigen::Triplet<double>& t) {
                                  return t.row() == (int)norm_row;
                              }),
               trip.end());
    {
        for (std::size_t j = 0; j < n2; j++)
            add(norm_row, j,
                region2.period[j] * cell_width(region2.eps, j, region2.eps[0]) / (2 * M_PI));
        for (std::size_t j = 0; j < nw; j++) {
            double w = cell_width(wg.eps, j, eps_sep);
            if (j < nc) {
                add(norm_row, i_comb + j, (wg.t1[j] + wg.t3[j]) * w / (2 * M_PI));
            } else {
                add(norm_row, i_p1 + (j - nc), wg.t1[j] * w / (2 * M_PI));
                add(norm_row, i_p3 + (j - nc), wg.t3[j] * w / (2 * M_PI));
            }
        }
        for (std::size_t j = 0; j < nt; j++)
            add(norm_row, i_tail + j,
                tl.t[j + 1] * cell_width(tl.eps, j + 1, tl.eps[0]) / (2 * M_PI));
    }

    Eigen::SparseMatrix<double> mat((int)ntot, (int)ntot);
    mat.setFromTriplets(trip.begin(), trip.end());
    mat.makeCompressed();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero((int)ntot);
    rhs((int)norm_row) = 1.0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(mat);
    if (lu.info() != Eigen::Success)
        throw SolverError("bvp_cross_check: factorization failed");
    Eigen::VectorXd x = lu.solve(rhs);
    double mat_scale = 0;
    for (int k = 0; k < mat.outerSize(); k++)
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it)
            mat_scale = std::max(mat_scale, std::fabs(it.value()));
    double res = (mat * x - rhs).norm() / (mat_scale * x.norm() + rhs.norm());
    if (!(res < 1e-10))
        throw SolverError("bvp_cross_check: solve residual too large", res);

    StationaryDistribution dist;
    dist.eps_crit = prof.eps_crit;
    dist.eps_res = prof.eps_res;
    dist.eps2 = region2.eps;
    dist.t2 = region2.period;
    dist.p2.resize(n2);
    for (std::size_t j = 0; j < n2; j++)
        dist.p2[j] = x((int)j);
    dist.eps13 = wg.eps;
    dist.t1 = wg.t1;
    dist.t3 = wg.t3;
    dist.p1.resize(nw);
    dist.p3.resize(nw);
    for (std::size_t j = 0; j < nw; j++) {
        dist.p1[j] = x((int)idx_p1_any(j));
        dist.p3[j] = x((int)idx_p3_any(j));
    }
    dist.eps3t = tl.eps;
    dist.t3t = tl.t;
    dist.p3t.resize(tl.eps.size());
    dist.p3t[0] = dist.p3.back();
    for (std::size_t j = 0; j < nt; j++)
        dist.p3t[j + 1] = x((int)(i_tail + j));

    if (wg.i_res >= 0)
        dist.flow_j = prof.res_weight * (dist.p1[wg.i_res] - dist.p3[wg.i_res]);

    double total = mass_of(dist.eps13, dist.p1, dist.t1) + mass_of(dist.eps2, dist.p2, dist.t2) +
                   mass_of(dist.eps13, dist.p3, dist.t3) +
                   mass_of(dist.eps3t, dist.p3t, dist.t3t);
    dist.raw_mass = total;
    dist.negative_mass_clipped = 0;
    clip_negative(dist.p1, dist.t1, dist.eps13, total, opt.clip_tolerance,
                  dist.negative_mass_clipped);
    clip_negative(dist.p3, dist.t3, dist.eps13, total, opt.clip_tolerance,
                  dist.negative_mass_clipped);
    clip_negative(dist.p2, dist.t2, dist.eps2, total, opt.clip_tolerance,
                  dist.negative_mass_clipped);
    clip_negative(dist.p3t, dist.t3t, dist.eps3t, total, opt.clip_tolerance,
                  dist.negative_mass_clipped);
    for (auto* v : {&dist.p1, &dist.p2, &dist.p3, &dist.p3t})
        for (double& y : *v)
            y /= total;
    dist.flow_j /= total;
    dist.occ1 = mass_of(dist.eps13, dist.p1, dist.t1);
    dist.occ2 = mass_of(dist.eps2, dist.p2, dist.t2);
    dist.occ3 = mass_of(dist.eps13, dist.p3, dist.t3) + mass_of(dist.eps3t, dist.p3t, dist.t3t);
    return dist;
}

Occupations occupations_from_distribution(const StationaryDistribution& dist)
{
    Occupations occ;
    occ.p1 = mass_of(dist.eps13, dist.p1, dist.t1);
    occ.p2 = mass_of(dist.eps2, dist.p2, dist.t2);
    occ.p3 = mass_of(dist.eps13, dist.p3, dist.t3) + mass_of(dist.eps3t, dist.p3t, dist.t3t);
    return occ;
}

} // namespace kerrosc
