#include "kerrosc/tunneling.hpp"
#include "kerrosc/errors.hpp"
#include "kerrosc/parallel.hpp"
#include <algorithm>
#include <cmath>
#include <sstream>

namespace kerrosc {

ResonanceAnchor nearest_resonance(const ModelParams& params)
{
    ResonanceAnchor ra;
    double m = 2 * params.delta / params.alpha;
    double fl = std::floor(m), fr = fl + 1;
    if (std::fabs(m - fl) == std::fabs(fr - m)) {
        ra.m0 = ((long long)fl % 2 == 0) ? (int)fl : (int)fr;  // tie toward even
    } else {
        ra.m0 = (int)std::lround(m);
    }
    ra.delta0 = 0.5 * ra.m0 * params.alpha;
    ra.offset = params.delta - ra.delta0;
    return ra;
}

namespace {

struct BarrierGeometry {
    double c;         // sqrt(2 alpha f^2 / delta^3)
    double s_saddle;  // saddle radius in the rescaled variable
    double q1, q2;    // barrier edges
};

// Rescaled barrier function g(s) = alpha*eps/delta^2 + s^2/2 - s^4/8 - c s,
// positive exactly where the acosh argument exceeds one. Its stationary
// radii g'(s) = -s^3/2 + s - c = 0 are the rescaled positions of the
// low-amplitude center (the dip) and the saddle (the hump), which brackets
// the unit crossings analytically even when the allowed band is thin.
BarrierGeometry locate_barrier(const ModelParams& p, const PhasePortrait& pp, double eps)
{
    if (!pp.bistable)
        throw Error("tunneling: bistable portrait required");
    if (!(eps > pp.eps_sep && eps < pp.eps1))
        throw Error("tunneling: quasienergy outside (eps_sep, eps1)");
    BarrierGeometry bg;
    bg.c = std::sqrt(2 * p.alpha * p.drive * p.drive / std::pow(p.delta, 3));
    const double e_red = p.alpha * eps / (p.delta * p.delta);
    auto g = [&](double s) { return e_red + 0.5 * s * s - 0.125 * s * s * s * s - bg.c * s; };
    auto gp = [&](double s) { return s - 0.5 * s * s * s - bg.c; };

    const double s_infl = std::sqrt(2.0 / 3.0);  // maximum of g'
    if (!(gp(s_infl) > 0))
        throw TopologyError("tunneling: drive beyond the bistable range of the barrier "
                            "function");
    double s_dip = math::brent_root(gp, 1e-14, s_infl);
    double hi = s_infl;
    while (gp(hi) > 0)
        hi *= 1.5;
    bg.s_saddle = math::brent_root(gp, s_infl, hi);

    if (!(g(bg.s_saddle) > 0)) {
        std::ostringstream os;
        os << "tunneling: no barrier at eps=" << eps << " (acosh argument never reaches 1)";
        throw TopologyError(os.str());
    }
    if (!(g(s_dip) < 0)) {
        std::ostringstream os;
        os << "tunneling: no classically allowed inner band at eps=" << eps
           << " (quasienergy above the barrier formula's well top)";
        throw TopologyError(os.str(), {s_dip, bg.s_saddle});
    }
    bg.q1 = math::brent_root(g, s_dip, bg.s_saddle);
    double s_hi = bg.s_saddle;
    while (g(s_hi) > 0 && s_hi < 1e3)
        s_hi *= 1.4;
    bg.q2 = math::brent_root(g, bg.s_saddle, s_hi);
    return bg;
}

} // namespace

namespace {

/// Quasienergy of the barrier function's own well top (coincides with eps1
/// for a pure Kerr model; a positive high-order term pushes the true eps1
/// slightly above it, where the barrier formula has no allowed inner band).
double barrier_formula_top(const ModelParams& p)
{
    double c = std::sqrt(2 * p.alpha * p.drive * p.drive / std::pow(p.delta, 3));
    auto gp = [&](double s) { return s - 0.5 * s * s * s - c; };
    const double s_infl = std::sqrt(2.0 / 3.0);
    if (!(gp(s_infl) > 0))
        throw TopologyError("tunneling: drive beyond the bistable range of the barrier "
                            "function");
    double s_dip = math::brent_root(gp, 1e-14, s_infl);
    double i2 = s_dip * s_dip;
    return (p.delta * p.delta / p.alpha) * (c * s_dip - 0.5 * i2 + 0.125 * i2 * i2);
}

} // namespace

std::pair<double, double> tunneling_branch_points(const ModelParams& p, const PhasePortrait& pp,
                                                  double eps)
{
    BarrierGeometry bg = locate_barrier(p, pp, eps);
    return {bg.q1, bg.q2};
}

double tunneling_action(const ModelParams& p, const PhasePortrait& pp, double eps)
{
    BarrierGeometry bg = locate_barrier(p, pp, eps);
    const double e_red = p.alpha * eps / (p.delta * p.delta);
    auto arg = [&](double s) {
        return (e_red + 0.5 * s * s - 0.125 * s * s * s * s) / (bg.c * s);
    };
    auto integrand = [&](double s) { return std::acosh(std::max(arg(s), 1.0)) * s; };

    // substitute s = q1 + u^2 / s = q2 - u^2 so the sqrt endpoint behaviour of
    // acosh(1+x) becomes smooth
    const double mid = 0.5 * (bg.q1 + bg.q2);
    auto left = [&](double u) { return integrand(bg.q1 + u * u) * 2 * u; };
    auto right = [&](double u) { return integrand(bg.q2 - u * u) * 2 * u; };
    double s_left = math::adaptive_gauss(left, 0, std::sqrt(mid - bg.q1), 1e-12);
    double s_right = math::adaptive_gauss(right, 0, std::sqrt(bg.q2 - mid), 1e-12);
    double action = (p.delta / p.alpha) * (s_left + s_right);
    if (!(action >= 0))
        throw QuadratureError("tunneling_action: negative or non-finite action");
    return action;
}

double tunneling_amplitude(const ModelParams& p, const PhasePortrait& pp, double eps,
                           double prefactor)
{
    if (prefactor == 0)
        return 0;
    double s = tunneling_action(p, pp, eps);
    return prefactor * p.delta * std::exp(-s);
}

double quasienergy_mismatch(double delta_offset, double i1, double i3, double v1, double v3)
{
    return delta_offset * (i3 - i1) + v1 - v3;
}

TunnelProfile lambda_profile(const ModelParams& params, const PhasePortrait& pp,
                             double delta_offset, const TunnelProfileOptions& opt)
{
    if (!pp.bistable)
        throw Error("lambda_profile: bistable portrait required");
    TunnelProfile prof;
    prof.anchor = nearest_resonance(params);
    prof.prefactor = opt.prefactor;

    // the continuous-amplitude window ends at the barrier formula's own well
    // top, which a positive high-order term can place just below eps1
    const double lo = pp.eps_sep;
    const double hi = std::min(pp.eps1, barrier_formula_top(params));
    const double w = hi - lo;
    const int n = std::max(opt.points, 16);
    const double sep_guard =
        std::max(opt.orbit.sep_margin * std::fabs(pp.eps_sep), 1e-13 * w);
    const double sep_refine = std::max(opt.sep_refine, 1.5 * sep_guard / w);
    prof.eps.resize(n);
    {
        // log spacing toward the separatrix over the first two thirds, log
        // spacing toward eps1 over the rest
        int n_sep = (2 * n) / 3, n_edge = n - n_sep;
        std::vector<double> pts;
        double l0 = std::log(sep_refine), l1 = std::log(0.5);
        for (int i = 0; i < n_sep; i++)
            pts.push_back(lo + w * std::exp(l0 + (l1 - l0) * i / (n_sep - 1.0)));
        double m0 = std::log(opt.edge_margin), m1 = std::log(0.5);
        for (int i = 0; i < n_edge; i++)
            pts.push_back(hi - w * std::exp(m0 + (m1 - m0) * i / (n_edge - 1.0)));
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [w](double a, double b) { return b - a < 1e-9 * w; }),
                  pts.end());
        prof.eps = pts;
    }

    auto resize_all = [&](std::size_t m) {
        for (auto* v : {&prof.t, &prof.mismatch, &prof.gamma13, &prof.gamma13_diag, &prof.lambda,
                        &prof.t1, &prof.k1, &prof.d1, &prof.i1, &prof.v1, &prof.t3, &prof.k3,
                        &prof.d3, &prof.i3, &prof.v3})
            v->resize(m);
    };
    resize_all(prof.eps.size());

    const double g = params.gamma;
    parallel_for(prof.eps.size(), opt.workers, [&](std::size_t i) {
        double e = prof.eps[i];
        ClassicalOrbit o1 = trace_orbit(params, pp, Region::r1, e, opt.orbit);
        ClassicalOrbit o3 = trace_orbit(params, pp, Region::r3, e, opt.orbit);
        Coefficients c1 = orbit_coefficients(params, o1);
        Coefficients c3 = orbit_coefficients(params, o3);
        prof.t1[i] = c1.period; prof.k1[i] = c1.drift; prof.d1[i] = c1.diffusion;
        prof.t3[i] = c3.period; prof.k3[i] = c3.drift; prof.d3[i] = c3.diffusion;
        prof.i1[i] = o1.mean_intensity;
        prof.i3[i] = o3.mean_intensity;
        prof.v1[i] = o1.mean_potential;
        prof.v3[i] = o3.mean_potential;
        prof.t[i] = tunneling_amplitude(params, pp, e, opt.prefactor);
        prof.mismatch[i] =
            quasienergy_mismatch(delta_offset, o1.mean_intensity, o3.mean_intensity,
                                 o1.mean_potential, o3.mean_potential);
        // coherence decay rates from the harmonic dictionaries, paired by level offset
        double cross = 0;
        int klo = std::max(o1.k_min, o3.k_min);
        int khi = std::min(o1.k_max(), o3.k_max());
        for (int k = klo; k <= khi; k++)
            cross += o1.harmonic(k) * o3.harmonic(k);
        prof.gamma13[i] = g * (o1.mean_intensity + o3.mean_intensity - 2 * cross);
        prof.gamma13_diag[i] =
            0.5 * g * (o1.mean_intensity + o3.mean_intensity - 2 * o1.harmonic(0) * o3.harmonic(0));
    });
    for (double tv : prof.t)
        if (tv == 0)
            prof.underflow = true;

    // degenerate amplitude: no strong-tunneling zone and no resonant channel
    bool t_all_zero = true;
    for (double tv : prof.t)
        if (tv != 0)
            t_all_zero = false;
    if (t_all_zero) {
        prof.eps_crit = pp.eps_sep;
        return prof;
    }

    // eps_crit: smallest root of mismatch(eps) = +/- t(eps) above the separatrix
    math::Pchip t_itp(prof.eps, prof.t), mis_itp(prof.eps, prof.mismatch);
    double crit = std::numeric_limits<double>::infinity();
    {
        std::function<double(double)> hs[2] = {
            [&](double e) { return mis_itp(e) - t_itp(e); },
            [&](double e) { return mis_itp(e) + t_itp(e); }};
        for (auto& h : hs) {
            for (std::size_t i = 1; i < prof.eps.size(); i++) {
                double f0 = h(prof.eps[i - 1]), f1 = h(prof.eps[i]);
                if (f0 == 0) {
                    crit = std::min(crit, prof.eps[i - 1]);
                    break;
                }
                if (f0 * f1 < 0) {
                    crit = std::min(crit, math::brent_root(h, prof.eps[i - 1], prof.eps[i]));
                    break;
                }
            }
        }
    }
    if (std::isinf(crit)) {
        // no crossing: either the amplitude dominates the mismatch over the
        // whole window or it never reaches it (e.g. t identically zero)
        if (prof.t.front() >= std::fabs(prof.mismatch.front())) {
            prof.eps_crit = pp.eps1;
            prof.whole_window_strong = true;
        } else {
            prof.eps_crit = pp.eps_sep;  // empty strong-tunneling zone
        }
    } else {
        prof.eps_crit = crit;
    }

    // eps_res: root of the mismatch above eps_crit, if any
    if (!prof.whole_window_strong) {
        for (std::size_t i = 1; i < prof.eps.size(); i++) {
            if (prof.eps[i] <= prof.eps_crit)
                continue;
            double e0 = std::max(prof.eps[i - 1], prof.eps_crit);
            double f0 = mis_itp(e0), f1 = mis_itp(prof.eps[i]);
            if (f0 * f1 < 0 || f1 == 0) {
                double root = (f1 == 0) ? prof.eps[i]
                                        : math::brent_root([&](double e) { return mis_itp(e); },
                                                           e0, prof.eps[i]);
                prof.eps_res = root;
                break;
            }
        }
    }

    if (prof.eps_res) {
        double e = *prof.eps_res;
        prof.res_t = tunneling_amplitude(params, pp, e, opt.prefactor);
        prof.res_mismatch = mis_itp(e);
        math::Pchip gtilde(prof.eps, prof.gamma13_diag);
        prof.res_gamma = gtilde(e);
        double den = prof.res_mismatch * prof.res_mismatch + 0.25 * prof.res_gamma * prof.res_gamma;
        prof.res_weight = (den > 0) ? prof.res_gamma * prof.res_t * prof.res_t / den : 0;
    }

    for (std::size_t i = 0; i < prof.eps.size(); i++) {
        if (prof.eps[i] <= prof.eps_crit) {
            double den = prof.mismatch[i] * prof.mismatch[i] +
                         0.25 * prof.gamma13[i] * prof.gamma13[i];
            prof.lambda[i] = (den > 0) ? prof.gamma13[i] * prof.t[i] * prof.t[i] / den : 0;
        } else {
            prof.lambda[i] = 0;
        }
    }
    return prof;
}

std::pair<double, std::optional<double>> critical_quasienergy(const TunnelProfile& profile)
{
    return {profile.eps_crit, profile.eps_res};
}

double calibrate_prefactor(const ModelParams& params, const PhasePortrait& pp,
                           const std::vector<Anticrossing>& anticrossings)
{
    double acc = 0;
    int n = 0;
    for (const auto& ac : anticrossings) {
        if (!(ac.min_gap > 0))
            continue;
        if (!(ac.mean_quasienergy > pp.eps_sep && ac.mean_quasienergy < pp.eps1))
            continue;
        double t_raw = tunneling_amplitude(params, pp, ac.mean_quasienergy, 1.0);
        if (!(t_raw > 0))
            continue;
        acc += std::log(0.5 * ac.min_gap / t_raw);
        n++;
    }
    if (n == 0)
        throw Error("calibrate_prefactor: no usable anticrossings");
    return std::exp(acc / n);
}

} // namespace kerrosc
