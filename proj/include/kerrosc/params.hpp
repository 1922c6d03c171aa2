#pragma once
#include <map>
#include <string>

namespace kerrosc {

/// Physical parameters of the driven Kerr oscillator in the rotating frame:
/// H = -delta n + (alpha/2) n^2 + sum_q alpha_q n^q + drive (a + a+),
/// coupled to a thermal bath with rate gamma and occupation n_thermal.
struct ModelParams {
    double delta = 0;              ///< detuning
    double alpha = 1;              ///< Kerr coefficient
    std::map<int, double> alpha_q; ///< higher-order coefficients, key q >= 3
    double drive = 0;              ///< drive amplitude f (real, >= 0)
    double gamma = 0;              ///< coupling to the dissipative environment
    double n_thermal = 0;          ///< thermal photon number N

    /// Noise intensity Q = gamma (N + 1/2).
    double noise_q() const { return gamma * (n_thermal + 0.5); }

    /// Critical drive sqrt(4 delta^3 / 27 alpha); bistable phase portrait for drive below it.
    double f_crit() const;

    /// V(I) = sum_q alpha_q I^q and its first two derivatives in I = |a|^2.
    double potential(double intensity) const;
    double potential_deriv(double intensity) const;
    double potential_second(double intensity) const;
    bool has_potential() const;

    /// Default Fock truncation, four times the high-amplitude intensity delta/alpha.
    int default_n_max() const;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;

    /// Copy with the higher-order coefficients removed (pure-Kerr reference).
    ModelParams without_potential() const;

    std::string describe() const;
};

} // namespace kerrosc
