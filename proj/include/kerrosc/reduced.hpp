#pragma once
#include "kerrosc/classical.hpp"
#include "kerrosc/tunneling.hpp"
#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace kerrosc {

struct ReducedLevel {
    Region region{};
    int region_idx = 0;   ///< position in the region's quasienergy-ordered ladder
    int bohr_n = 0;       ///< area quantum number
    double eps = 0;
};

struct ReducedPair {
    int level1 = -1, level3 = -1;  ///< indices into the level list
    double t = 0;                  ///< tunneling matrix element
    double mismatch = 0;           ///< eps_{n1} - eps_{n3}
    double gamma_eff = 0;          ///< gradient-collapsed coherence decay rate
};

/// Discrete region-basis master-equation model: diagonal populations for every
/// Bohr-Sommerfeld level of regions 1, 2 and 3 (including the outer ladder up
/// to the table cutoff) and one complex coherence per tunneling-paired
/// region-1/region-3 level pair. The state vector is
/// [populations..., (Re rho13, Im rho13) per pair].
struct ReducedModel {
    ModelParams params;
    std::vector<ReducedLevel> levels;
    std::vector<ReducedPair> pairs;
    Eigen::MatrixXd generator;        ///< full linear generator, d state / dt
    Eigen::MatrixXd rate_matrix;      ///< diagonal sector only (no tunneling)
    int unpaired_region1 = 0, unpaired_region3 = 0;
    std::size_t state_size() const { return levels.size() + 2 * pairs.size(); }
};

struct ReducedOptions {
    double prefactor = 1.0;           ///< tunneling amplitude prefactor
    int max_harmonic = 64;            ///< offset truncation for the a-element dictionary
    double junction_boost = 1.0;      ///< scale of the separatrix exchange rates
    bool junction = true;             ///< couple the separatrix-adjacent levels
};

ReducedModel build_reduced_generator(const ModelParams& params, const PhasePortrait& portrait,
                                     const RegionTable& table1, const RegionTable& table2,
                                     const RegionTable& table3,
                                     const ReducedOptions& opt = {});

struct ReducedSolution {
    Eigen::VectorXd populations;             ///< per level, sums to 1
    std::vector<std::complex<double>> coherence;  ///< per pair (zero for eliminated solve)
    std::vector<double> pair_current;        ///< probability flow region 1 -> region 3
    double p1 = 0, p2 = 0, p3 = 0;
};

/// Stationary state of the full model (populations plus coherences).
ReducedSolution reduced_steady_state(const ReducedModel& model);

/// Stationary state with the coherences eliminated through their local
/// Lorentzian stationary value, which closes the populations into a rate
/// equation with pair rates gamma_eff t^2 / (mismatch^2 + gamma_eff^2/4).
ReducedSolution reduced_steady_state_eliminated(const ReducedModel& model);

} // namespace kerrosc
