// core.hpp — System parameters, drives, reservoir spectral densities and memory kernels

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace decaysim {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// --------------------------------- Errors -----------------------------------

/// Invalid parameters or solver configuration (maps to CLI exit code 1).
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Divergence, norm drift or an unrepresentable value during a computation
/// (maps to CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ------------------------------ System model --------------------------------

/// Oscillating level, E0(t) = E0 - u sin(omega t).
struct LevelDrive {
    double u{0.0};
    double omega{1.0};
};

/// Oscillating barrier, w(t) = 1 + alpha sin(omega t).
struct BarrierDrive {
    double alpha{0.0};
    double omega{1.0};
};

/// Static parameters of the well plus optional periodic drives. Energies and
/// rates are in units of the wide-band width gamma, hbar = 1.
struct SystemParams {
    double e0{0.0};
    double gamma{1.0};
    std::optional<LevelDrive> level_drive;
    std::optional<BarrierDrive> barrier_drive;

    bool is_static() const noexcept { return !level_drive && !barrier_drive; }

    /// Throws ConfigurationError when an invariant is violated.
    void validate() const;
};

/// Time dependence entering the amplitude equations: E0(t), w(t) and their
/// derivatives. Sinusoidal drives carry their parameters in `kind` so that
/// solvers can use closed-form integrals.
struct DriveProfile {
    enum class Kind { constant, level, barrier, combined, custom };

    Kind kind{Kind::constant};
    std::function<double(double)> e0_of_t;
    std::function<double(double)> e0_dot_of_t;
    std::function<double(double)> w_of_t;
    std::function<double(double)> w_dot_of_t;

    static DriveProfile from(const SystemParams& params);
};

// ---------------------------- Spectral densities ----------------------------

struct WideBand {};
struct Lorentzian {
    double lambda{1.0};
};
struct Semicircle {
    double w_band{1.0};
};
struct FiniteChain {
    int n_levels{1};
    double w_band{1.0};
};

using SpectralDensity = std::variant<WideBand, Lorentzian, Semicircle, FiniteChain>;

void validate(const SpectralDensity& sd);
std::string describe(const SpectralDensity& sd);

/// Half-width of the energy support; +inf for WideBand and Lorentzian.
double support_half_width(const SpectralDensity& sd);

/// Lorentzian with the same curvature at the band center as a semicircle of half-width W.
inline Lorentzian matched_lorentzian(const Semicircle& sc) { return Lorentzian{std::sqrt(2.0) * sc.w_band}; }

/// S(E) for reservoir `sd` coupled with wide-band width `gamma`. FiniteChain
/// returns the continuum (semicircle) density its levels sample.
double spectral_density_at(const SpectralDensity& sd, double e, double gamma = 1.0);

/// Memory kernel S~(tau) = \int S(E) e^{-i E tau} dE. Defined for Lorentzian
/// and Semicircle only: WideBand is a delta function and FiniteChain is
/// evolved exactly, so both throw ConfigurationError.
Complex memory_kernel(const SpectralDensity& sd, double tau, double gamma = 1.0);

// -------------------------- Finite tight-binding chain ----------------------

/// Chain levels E_r = W cos(r pi / (N+1)), r = 1..N (strictly decreasing).
std::vector<double> chain_levels(int n_levels, double w_band);

/// Couplings Omega(E_r) = sqrt(gamma W / (2 (N+1))) sqrt(1 - E_r^2 / W^2),
/// normalized so that Omega^2 rho reproduces the semicircle density.
std::vector<double> chain_couplings(int n_levels, double w_band, double gamma = 1.0);

/// Gaussian-broadened chain density sum_r Omega_r^2 g_sigma(E - E_r); tends to
/// the semicircle S(E) as N grows at fixed W.
double broadened_chain_density(const FiniteChain& chain, double e, double sigma, double gamma = 1.0);

/// sgn with sgn(0) = 0.
constexpr double sgn(double t) noexcept { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

}  // namespace decaysim
