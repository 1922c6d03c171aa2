#pragma once
#include "kerrosc/math/numerics.hpp"
#include "kerrosc/params.hpp"
#include <complex>
#include <optional>
#include <vector>

namespace kerrosc {

using cplx = std::complex<double>;

/// Phase-portrait regions. Region 1 is the basin of the low-amplitude stable
/// state (quasienergy window eps_sep..eps1, the local maximum of H), region 2
/// the basin of the high-amplitude state (eps2..eps_sep, the global minimum),
/// region 3 the outer orbits above eps_sep; r3_outer labels outer orbits with
/// quasienergy above eps1.
enum class Region : int { r1 = 1, r2 = 2, r3 = 3, r3_outer = 4 };

const char* region_name(Region r);

struct StationaryPoint {
    enum class Kind { center_low_amplitude, center_high_amplitude, saddle };
    double a = 0;      ///< position on the real axis
    double eps = 0;    ///< quasienergy H(a)
    Kind kind{};
    double omega = 0;  ///< small-oscillation frequency (centers only)
};

struct PhasePortrait {
    ModelParams params;
    std::vector<StationaryPoint> points;
    bool bistable = false;
    // populated when bistable:
    double a1 = 0, a2 = 0, a_saddle = 0;        ///< low-amp center, high-amp center, saddle
    double eps1 = 0, eps2 = 0, eps_sep = 0;
    double omega1 = 0, omega2 = 0;              ///< center frequencies

    /// Quasienergy window (lo, hi) of orbits in a region; region 3's upper end is open.
    std::pair<double, double> window(Region r) const;
};

/// Classical Hamiltonian H(a, a*) and its a-gradient.
double classical_hamiltonian(const ModelParams& params, cplx a);
cplx classical_gradient(const ModelParams& params, cplx a);  // dH/da*

/// Locate and classify the stationary points of the flow (all on the real
/// axis for real drive). drive == 0 is rejected as degenerate.
PhasePortrait find_stationary_points(const ModelParams& params);

struct ClassicalOrbit {
    Region region{};
    double eps = 0;
    double period = 0;
    double action_area = 0;       ///< phase-space area |oint (x dy - y dx)|
    double mean_intensity = 0;    ///< time average of |a|^2
    double mean_potential = 0;    ///< time average of V(|a|^2)
    double seed = 0;              ///< real-axis starting point
    std::vector<double> times;    ///< uniform sample times over one period
    std::vector<cplx> samples;    ///< a(t_k)
    /// Fourier coefficients of a(t) = sum_k c_k exp(-i k Omega t); starting at
    /// the real-axis seed makes them real. fourier[i] is the coefficient for
    /// harmonic k = k_min + i.
    std::vector<double> fourier;
    int k_min = 0;
    double fourier_residual = 0;  ///< largest |Im c_k| before dropping it

    double harmonic(int k) const
    {
        int i = k - k_min;
        return (i >= 0 && i < (int)fourier.size()) ? fourier[i] : 0.0;
    }
    int k_max() const { return k_min + (int)fourier.size() - 1; }
};

struct OrbitOptions {
    double rtol = 1e-12;
    int samples = 1024;           ///< uniform resample count (doubled until tails resolve)
    int max_samples = 8192;
    double fourier_tail = 1e-10;  ///< harmonics kept until |c_k| < tail * max|c_k|
    double sep_margin = 1e-6;     ///< reject eps within sep_margin*|eps_sep| of eps_sep
};

/// Integrate the constant-quasienergy orbit through the region's real-axis
/// seed and extract period, samples, Fourier components and time averages.
ClassicalOrbit trace_orbit(const ModelParams& params, const PhasePortrait& portrait,
                           Region region, double eps, const OrbitOptions& opt = {});

struct Coefficients {
    double period = 0;   ///< T_r
    double drift = 0;    ///< K_r, sign convention <d eps/dt> = -gamma K/T
    double diffusion = 0;///< D_r = oint |dH/da|^2 dt, nonnegative
};

/// Drift/diffusion contour coefficients of the quasienergy Fokker-Planck
/// equation, evaluated as time integrals along the sampled orbit.
Coefficients orbit_coefficients(const ModelParams& params, const ClassicalOrbit& orbit);

struct BohrLevel {
    int n = 0;
    double eps = 0;
};

/// Tabulated orbit data for one region on a quasienergy grid refined toward
/// the separatrix, with interpolators for the FPE and the reduced tier.
struct RegionTable {
    Region region{};
    std::vector<double> eps;
    std::vector<double> period, drift, diffusion;
    std::vector<double> intensity, potential_avg;
    std::vector<ClassicalOrbit> orbits;   ///< orbit per grid node (Fourier dictionaries)
    math::Pchip period_itp, drift_itp, diffusion_itp, intensity_itp, potential_itp, area_itp;

    double ratio_kd(double e) const { return drift_itp(e) / diffusion_itp(e); }
};

struct TableOptions {
    int points = 48;
    double sep_refine = 1e-4;    ///< innermost grid offset, relative to window span
    double edge_margin = 1e-9;   ///< offset from the non-separatrix end, relative
    double tail_exponent = 12;   ///< region-3 tail extends until its zero-flow decay
                                 ///< exponent (gamma/Q) int K/D reaches this
    double tail_step = 0.5;      ///< tail node spacing in units of (N+1/2) level spacings
    double tail_cap = 50;        ///< hard stop, multiples of the window span
    int workers = 1;
    OrbitOptions orbit;
};

RegionTable tabulate_region(const ModelParams& params, const PhasePortrait& portrait,
                            Region region, const TableOptions& opt = {});

/// Quantize the orbit area, area(eps_n)/(2 pi) = n + 1/2, on the region's window.
std::vector<BohrLevel> bohr_sommerfeld_levels(const ModelParams& params,
                                              const PhasePortrait& portrait, Region region,
                                              const RegionTable* table = nullptr,
                                              double eps_cap = 0);

/// Real-axis seed of the constant-eps contour in a region (root of H(x) = eps
/// in the interval delimited by the stationary points).
double orbit_seed(const ModelParams& params, const PhasePortrait& portrait, Region region,
                  double eps);

} // namespace kerrosc
