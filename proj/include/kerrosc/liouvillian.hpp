#pragma once
#include "kerrosc/fock.hpp"
#include "kerrosc/spectrum.hpp"
#include <optional>
#include <string>
#include <vector>

namespace kerrosc {

struct RegionOccupations {
    double p1 = 0, p2 = 0, p3 = 0;   ///< region 3 includes the outer 3' states
    double boundary_mass = 0;        ///< probability on separatrix-band states
    double split_mass = 0;           ///< probability split between regions 1 and 3
    bool warning = false;            ///< boundary-band population above 5%
};

struct SteadyState {
    Eigen::MatrixXcd rho;
    double mean_intensity = 0;
    double residual = 0;             ///< ||L rho|| / ||rho|| excluding the trace row
    RegionOccupations occupations;
};

/// Stationary density matrix of the quantum master equation by a sparse
/// null-space solve with one row replaced by the trace constraint. Falls back
/// to a dense solve for small dimensions when the sparse factorization
/// degrades.
SteadyState steady_state(const ModelParams& params, int n_max,
                         const ClassicalBranches* branches = nullptr);

/// Region occupations P_r = sum over eigenstates labeled r of <v|rho|v>,
/// with hybridized states split between regions 1 and 3 by their intensity
/// weights.
RegionOccupations region_occupations(const Eigen::MatrixXcd& rho,
                                     const QuasienergySpectrum& spectrum);

struct SweepRow {
    double delta = 0;
    double p1 = 0, p2 = 0, p3 = 0;
    double mean_intensity = 0;
    double residual = 0;
    bool ok = false;
    std::string error;
};

/// Steady state plus occupations for every detuning in the grid; grid points
/// run independently (parallel across points), failures are recorded per row
/// and never abort the sweep. A labeling context built at a nearby detuning
/// may be shared across the grid (state and window quasienergies shift
/// together, so labels are insensitive to small detuning changes).
std::vector<SweepRow> sweep_occupations(const ModelParams& params_base,
                                        const std::vector<double>& delta_grid, int n_max,
                                        int workers,
                                        const ClassicalBranches* branches = nullptr);

} // namespace kerrosc
