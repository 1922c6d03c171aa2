#pragma once
#include "kerrosc/params.hpp"
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace kerrosc {

/// Peak of a sampled curve, refined by a parabolic fit through the maximum.
struct Peak {
    double x = 0, y = 0;
    double prominence = 0;
    int index = 0;
};
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y,
                             double min_prominence = 0);

/// Experiment configuration. All frequencies are expressed in units of the
/// Kerr coefficient (alpha = 1 internally); detuning enters as 2 delta/alpha.
/// Any of the model axes may carry a grid; points are the cartesian product
/// with detuning varying fastest.
struct ExperimentConfig {
    std::string mode = "sweep";   ///< sweep | spectrum | tunneling | fpe
    std::vector<double> m_grid{12.0};      ///< 2 delta / alpha
    std::vector<double> alpha3{0.0};       ///< alpha_3 / alpha
    std::vector<double> gamma{1e-3};       ///< gamma / alpha
    std::vector<double> f_ratio{0.4};      ///< drive / f_crit (resolved per point)
    std::vector<double> n_thermal{3.0};
    std::set<std::string> tiers{"quantum"};
    int n_max = 0;                ///< 0 = default truncation per point
    int workers = 0;              ///< 0 = environment / hardware default
    std::string output_dir = "out";
    double tunnel_prefactor = 1.0;
    bool emit_svg = false;
    std::string note;             ///< free-form annotation echoed into the manifest

    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig preset(const std::string& name);
    std::string to_json() const;
    void validate() const;

    /// Model parameters for one grid point, with alpha = 1 and the drive
    /// resolved against f_crit.
    ModelParams resolve(double m, double a3, double g, double fr, double nth) const;
};

struct ExperimentOutcome {
    int exit_code = 0;   ///< 0 success, 1 partial failures, 2 total failure
    std::vector<std::string> files;
    std::vector<std::string> errors;
};

/// Execute the configured experiment: per-tier tables, a quick-look SVG when
/// requested, and a manifest listing every file with a content hash. Reruns
/// with the same config are byte-identical.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

struct TierComparison {
    std::size_t rows = 0;
    double max_rel_dev_p2 = 0;
    double peak_offset = 0;       ///< largest |peak position difference|, grid units
    int flagged = 0;              ///< points outside the declared validity band
};

/// Compare P2 across two tiers of a finished sweep directory; writes
/// compare.tsv next to the inputs and returns the headline numbers.
TierComparison compare_tiers(const std::filesystem::path& sweep_dir, const std::string& tier_a,
                             const std::string& tier_b);

} // namespace kerrosc
