#pragma once
#include "kerrosc/classical.hpp"
#include "kerrosc/fock.hpp"
#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace kerrosc {

/// Classical intensity branches used to attach region labels to eigenstates.
/// The trajectory-averaged intensities are stored against the window-relative
/// coordinate u = (eps - eps_sep)/(eps_edge - eps_sep), which barely moves
/// under small detuning changes, so one context can label a whole sweep.
struct ClassicalBranches {
    PhasePortrait portrait;   ///< portrait at the construction point
    math::Pchip i1, i2, i3;   ///< intensity vs window-relative coordinate
    double band_frac = 0;     ///< boundary band as a fraction of min(omega1, omega2)

    double branch_intensity(Region r, double eps, const PhasePortrait& pp) const;
    double band_of(const PhasePortrait& pp) const
    {
        return band_frac * std::min(pp.omega1, pp.omega2);
    }
};

ClassicalBranches build_classical_branches(const ModelParams& params, int workers = 1);

struct SpectrumLevel {
    double eps = 0;
    double mean_photon = 0;
    Region label = Region::r3_outer;
    bool boundary = false;   ///< inside the separatrix tolerance band
    double weight1 = 0;      ///< hybrid weight on region 1 when label is 1 or 3
};

struct QuasienergySpectrum {
    ModelParams params;
    std::vector<SpectrumLevel> levels;           ///< sorted ascending in eps
    Eigen::MatrixXd basis;                       ///< eigenvectors in columns
    std::vector<std::pair<int, int>> degenerate_clusters;
    bool labels_valid = false;
};

/// Dense symmetric eigensolve of the rotating-frame Hamiltonian with region
/// labels from the classical branches (labels skipped when no bistable
/// portrait exists, e.g. drive = 0).
QuasienergySpectrum diagonalize(const ModelParams& params, int n_max,
                                const ClassicalBranches* branches = nullptr);

struct Anticrossing {
    int curve_a = 0, curve_b = 0;    ///< tracked-curve ids
    double delta_at_min = 0;         ///< detuning of the refined gap minimum
    double min_gap = 0;              ///< refined minimal gap (2 t_n)
    double mean_quasienergy = 0;
    double predicted_shift = 0;      ///< first-order anticrossing displacement
    double mean_photon_a = 0, mean_photon_b = 0;
    bool at_grid_edge = false;
    int grid_index = 0;                        ///< grid point nearest the minimum
    std::vector<std::array<double, 3>> trace;  ///< (delta, gap, mean eps) per grid point
};

struct ScanOptions {
    int n_max = 0;              ///< 0 = default truncation at the largest detuning
    double max_gap = 0.5;       ///< ignore pair minima above this gap
    double prominence = 0.99;   ///< minimum must be below this fraction of nearby gaps
    int side_offset = 10;       ///< grid offset used for the prominence/label checks
    bool require_13 = true;     ///< keep only region-1/region-3 pairs
    int workers = 1;
    bool keep_traces = false;
};

struct ScanResult {
    std::vector<double> delta_grid;
    std::vector<Anticrossing> anticrossings;
    int unresolved_at_edge = 0;  ///< minima discarded for sitting on the grid edge
};

/// Track quasienergy levels of a generic symmetric-matrix family across a
/// parameter grid by eigenvector overlap and locate avoided-crossing minima
/// with 3-point parabolic refinement of gap^2.
ScanResult scan_gap_minima(const std::function<Eigen::MatrixXd(double)>& matrix_of_delta,
                           const std::vector<double>& delta_grid, const ScanOptions& opt,
                           const std::function<bool(int, int, int)>& pair_filter = {});

/// Kerr-oscillator scan over detuning: pairs restricted to one region-1 and
/// one region-3 labeled curve (checked on both sides of each minimum), with
/// the first-order shift prediction evaluated at each detected minimum.
ScanResult scan_anticrossings(const ModelParams& params_base,
                              const std::vector<double>& delta_grid, const ScanOptions& opt);

/// First-order displacement of an anticrossing caused by the higher-order
/// nonlinearity, evaluated from the symmetric/antisymmetric combinations of
/// the two hybridized eigenvectors (which recover the diabatic region states).
/// Rejects pairs whose hybridization deviates from an even mixture by more
/// than 10 degrees of mixing angle.
double predict_shift(const ModelParams& params, int n_max, double delta0, int level_i,
                     int level_j);

/// Same evaluation from two explicit eigenvectors of a Hamiltonian containing
/// the perturbation (used at detected minima during scans).
double predict_shift_from_vectors(const ModelParams& params, const Eigen::VectorXd& vi,
                                  const Eigen::VectorXd& vj);

} // namespace kerrosc
