#pragma once
#include "kerrosc/classical.hpp"
#include <Eigen/Dense>

namespace kerrosc {

/// Husimi quasi-probability Q(beta) = <beta|rho|beta> / pi.
double husimi_q(const Eigen::MatrixXcd& rho, cplx beta);

/// Phase-space classification of a point by its quasienergy and radial
/// position relative to the tunneling barrier (region 2 below the separatrix,
/// outer-3 above eps1, regions 1/3 split at the barrier radii in between).
Region classify_point(const ModelParams& params, const PhasePortrait& portrait, cplx beta);

struct HusimiOccupations {
    double p1 = 0, p2 = 0, p3 = 0;
    double barrier = 0;   ///< mass on barrier-band points, split evenly into 1/3
    double coverage = 0;  ///< total integrated Q over the grid (should be ~1)
};

/// Region occupations by integrating Q over classical region masks on a
/// uniform phase-space grid (cross-check for the eigenstate-projection
/// definition).
HusimiOccupations husimi_region_occupations(const Eigen::MatrixXcd& rho,
                                            const ModelParams& params,
                                            const PhasePortrait& portrait, int grid_points = 121);

} // namespace kerrosc
