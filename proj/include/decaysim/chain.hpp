// chain.hpp — Exact evolution of the well coupled to a finite tight-binding chain
//
// The (N+1)-level Hamiltonian has the well level E0(t) on site 0, the chain
// levels E_r on the diagonal and a star coupling w(t) Omega_r between them.
// Static problems are propagated by diagonalization; driven problems by a
// Strang splitting whose coupling factor is an exact rank-2 rotation.

#pragma once

#include "decaysim/core.hpp"
#include "decaysim/spectra.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace decaysim {

struct ChainModel {
    int n_levels{1};
    double w_band{1.0};
    double e0{0.0};
    double gamma{1.0};
    std::vector<double> energies;   ///< strictly decreasing
    std::vector<double> couplings;  ///< >= 0, vanishing at the band edges

    static ChainModel build(const FiniteChain& chain, const SystemParams& params);
    FiniteChain reservoir() const { return {n_levels, w_band}; }
    /// Static Hamiltonian matrix.
    Eigen::MatrixXd hamiltonian() const;
};

struct ChainState {
    Complex b0{1.0, 0.0};
    Eigen::VectorXcd br;
    double time{0.0};

    double norm() const { return std::norm(b0) + br.squaredNorm(); }
};

struct ChainSeries {
    std::vector<double> times;
    std::vector<Complex> b0;
    std::vector<double> norm_times;
    std::vector<double> norm;  ///< |b0|^2 + sum |br|^2 at norm_times
    std::vector<ChainState> states;  ///< filled when requested
    ChainState final_state;

    std::vector<double> survival() const;
    double max_norm_drift() const;
};

struct ChainOptions {
    bool keep_states{false};
    std::size_t norm_stride{16};  ///< static runs rebuild the full state every this many nodes
    double norm_limit{1e-6};  ///< abort threshold on |norm - 1|
};

/// dt * (W + |E0| + |u|) must not exceed 0.05. t_end >= 0.
ChainSeries evolve_chain(const ChainModel& model, const DriveProfile& drive, double t_end, double dt,
                         const ChainOptions& opts = {});

inline constexpr double revival_fall = 0.01;
inline constexpr double revival_rise = 0.05;

/// First time after P0 has fallen below `fall` at which it rises above `rise`
/// (linearly interpolated). Throws ConfigurationError if P0 never falls.
std::optional<double> revival_time(const std::vector<double>& times, const std::vector<double>& p0,
                                   double fall = revival_fall, double rise = revival_rise);
std::optional<double> revival_time(const ChainSeries& series, double fall = revival_fall, double rise = revival_rise);

/// |b_r|^2 rho(E_r) with rho = (N+1) / (pi sqrt(W^2 - E_r^2)), ascending in energy.
EnergySpectrum lineshape_exact(const ChainState& state, const ChainModel& model);
EnergySpectrum lineshape_exact(const ChainSeries& series, const ChainModel& model);

}  // namespace decaysim
