// spectra.hpp — Energy distribution of the tunneled particle
//
// P_r(t) = S(E_r) |\int_0^t w(t') b0(t') e^{i E_r t'} dt'|^2 from a sampled
// trajectory, and the t -> infinity Floquet limits for periodic drives.

#pragma once

#include "decaysim/closedform.hpp"
#include "decaysim/core.hpp"
#include "decaysim/timesolver.hpp"

#include <limits>
#include <vector>

namespace decaysim {

struct EnergySpectrum {
    std::vector<double> energies;  ///< ascending
    std::vector<double> values;    ///< densities, >= 0
    double time{std::numeric_limits<double>::infinity()};
    double norm{0.0};  ///< trapezoidal integral over the grid
    double tail{0.0};  ///< estimated weight outside the grid

    double total() const noexcept { return norm + tail; }
    /// Linear interpolation on the grid.
    double at(double e) const;
};

enum class DriveKind { none, level, barrier };

/// Trapezoidal integral of values over energies.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

/// Uniform grid of `points` nodes on [E0 - 8G - n_max w, E0 + 8G + n_max w],
/// refined `refine`-fold within G of every sub-level with relative weight above 1e-3.
std::vector<double> default_energy_grid(const SystemParams& params, int points = 4001, int refine = 5);

/// P_r(t) at t = traj.times.back() (which must be >= 0). Throws
/// ConfigurationError when dt * max|E| > 0.2.
EnergySpectrum spectrum_from_trajectory(const AmplitudeTrajectory& traj, const DriveProfile& drive,
                                        const SpectralDensity& sd, const std::vector<double>& grid);

/// Long-time wide-band spectrum: Lorentzian for `none`, Floquet sums otherwise.
/// `barrier` selects the first order or the exact width integral for barrier drives.
EnergySpectrum spectrum_asymptotic(const SystemParams& params, DriveKind kind, const std::vector<double>& grid,
                                   closedform::BarrierPhase barrier = closedform::BarrierPhase::linear);

/// Grid indices of local maxima above `rel_height` times the global maximum.
std::vector<std::size_t> spectrum_peaks(const EnergySpectrum& s, double rel_height = 1e-2);

}  // namespace decaysim
