#pragma once
#include "kerrosc/classical.hpp"
#include "kerrosc/spectrum.hpp"
#include <optional>
#include <vector>

namespace kerrosc {

/// Nearest multiphoton resonance: integer m0 closest to 2 delta/alpha (ties
/// resolved toward even m0) and the offset delta - m0 alpha / 2.
struct ResonanceAnchor {
    int m0 = 0;
    double delta0 = 0;
    double offset = 0;
};
ResonanceAnchor nearest_resonance(const ModelParams& params);

/// WKB barrier action between the same-quasienergy orbits of regions 1 and 3,
/// S = (delta/alpha) int_{q1}^{q2} acosh(A(s)) s ds with A the rescaled radial
/// barrier function and q1 < q2 its unit crossings around the saddle radius.
/// The quadrature is adapted to the sqrt endpoint behaviour of acosh.
double tunneling_action(const ModelParams& params, const PhasePortrait& portrait, double eps);

/// Branch points q1, q2 of the action integrand (exposed for tests).
std::pair<double, double> tunneling_branch_points(const ModelParams& params,
                                                  const PhasePortrait& portrait, double eps);

/// Tunneling amplitude prefactor * delta * exp(-S(eps)); underflow yields an
/// exact zero.
double tunneling_amplitude(const ModelParams& params, const PhasePortrait& portrait, double eps,
                           double prefactor = 1.0);

/// Continuous quasienergy mismatch between paired region-1/region-3 states,
/// delta_eps13(eps) = offset (I3 - I1) + Vbar1 - Vbar3, from trajectory
/// averages (the first-order form whose zero reproduces the anticrossing
/// displacement).
double quasienergy_mismatch(double delta_offset, double i1, double i3, double v1, double v3);

struct TunnelProfileOptions {
    int points = 72;
    double sep_refine = 1e-4;    ///< innermost relative offset from the separatrix
    double edge_margin = 1e-6;   ///< relative offset from eps1
    double prefactor = 1.0;
    int workers = 1;
    OrbitOptions orbit;
};

/// Tunneling profile on a shared quasienergy grid over (eps_sep, eps1):
/// t(eps), delta_eps13(eps), the coherence decay rates, the tunneling rate
/// lambda(eps) of the Fokker-Planck coupling below eps_crit, and the resonant
/// delta-term bookkeeping above it. The classical coefficients of both
/// regions on the same grid are tabulated alongside for the FPE.
struct TunnelProfile {
    ResonanceAnchor anchor;
    double prefactor = 1;
    std::vector<double> eps;
    std::vector<double> t;             ///< tunneling amplitude
    std::vector<double> mismatch;      ///< delta_eps13
    std::vector<double> gamma13;       ///< full-harmonic coherence decay
    std::vector<double> gamma13_diag;  ///< zeroth-harmonic-only decay rate
    std::vector<double> lambda;        ///< continuous tunneling rate (zero above eps_crit)
    // classical coefficients per region on the shared grid
    std::vector<double> t1, k1, d1, i1, v1;
    std::vector<double> t3, k3, d3, i3, v3;

    double eps_crit = 0;
    bool whole_window_strong = false;      ///< no mismatch/t crossing: eps_crit = eps1
    std::optional<double> eps_res;         ///< resonant-pair quasienergy, if any
    double res_t = 0, res_gamma = 0, res_mismatch = 0;
    double res_weight = 0;                 ///< flux-jump coefficient at eps_res
    bool underflow = false;                ///< some t underflowed to exact zero
};

TunnelProfile lambda_profile(const ModelParams& params, const PhasePortrait& portrait,
                             double delta_offset, const TunnelProfileOptions& opt = {});

/// Critical quasienergy (smallest root of mismatch = +/- amplitude above the
/// separatrix; the window top when no root exists) and the resonant-pair
/// quasienergy above it, if any.
std::pair<double, std::optional<double>> critical_quasienergy(const TunnelProfile& profile);

/// Least-squares single-constant calibration of the amplitude prefactor
/// against full-quantum half-gaps: returns exp(mean(log(gap/2) - log t_wkb)).
double calibrate_prefactor(const ModelParams& params, const PhasePortrait& portrait,
                           const std::vector<Anticrossing>& anticrossings);

} // namespace kerrosc
