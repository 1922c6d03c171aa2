#pragma once
#include "kerrosc/classical.hpp"
#include "kerrosc/tunneling.hpp"
#include <optional>
#include <vector>

namespace kerrosc {

/// Piecewise stationary distribution over quasienergy. P values are per-state
/// probabilities; occupations integrate them against the density of states
/// T_r/(2 pi). Region 1 and region 3 share the window grid (eps_sep, eps1);
/// region 3 continues on the tail grid above eps1.
struct StationaryDistribution {
    std::vector<double> eps2, p2, t2;          ///< region 2 branch
    std::vector<double> eps13, p1, p3, t1, t3; ///< shared window branch
    std::vector<double> eps3t, p3t, t3t;       ///< region-3 tail above eps1
    double flow_j = 0;
    double eps_crit = 0;
    std::optional<double> eps_res;
    double occ1 = 0, occ2 = 0, occ3 = 0;       ///< integrated occupations, sum 1
    double raw_mass = 0;                       ///< mass before normalization (P(eps_sep)=1)
    double negative_mass_clipped = 0;
};

struct FpeOptions {
    double clip_tolerance = 1e-9;   ///< allowed |negative mass| from quadrature noise
    /// Cross-check mode: false (default) discretizes the same three-branch
    /// piecewise model as the closed form (equilibrated zone as one combined
    /// unknown); true solves the drift-diffusion equations coupled by the full
    /// Lorentzian tunneling rate, which resolves the crossover layer around
    /// eps_crit that the piecewise idealization collapses.
    bool smooth_lambda = false;
};

/// Closed-form three-branch stationary solution: equilibrated below eps_crit,
/// flow-carrying between eps_crit and eps_res, zero-flow above; region 2
/// solved with zero flow and matched at the separatrix; flow J from the
/// resonant-pair boundary condition; global normalization to unit probability.
StationaryDistribution stationary_solution(const ModelParams& params,
                                           const PhasePortrait& portrait,
                                           const TunnelProfile& profile,
                                           const RegionTable& region2,
                                           const RegionTable& region3,
                                           const FpeOptions& opt = {});

/// Independent cross-check: conservative finite-volume discretization of the
/// drift-diffusion-tunneling equation on the same grids, with zero-flux outer
/// boundaries, a shared junction node at the separatrix, the continuous
/// tunneling coupling below eps_crit and the resonant delta as a point source.
StationaryDistribution bvp_cross_check(const ModelParams& params,
                                       const PhasePortrait& portrait,
                                       const TunnelProfile& profile,
                                       const RegionTable& region2,
                                       const RegionTable& region3,
                                       const FpeOptions& opt = {});

/// Occupations recomputed from a sampled distribution (density-of-states
/// weighted trapezoid per region).
struct Occupations {
    double p1 = 0, p2 = 0, p3 = 0;
};
Occupations occupations_from_distribution(const StationaryDistribution& dist);

} // namespace kerrosc
