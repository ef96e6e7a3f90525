// timesolver.hpp — Time-domain solvers for the well amplitude b0(t)
//
// Three routes on signed, uniform time grids that always contain t = 0:
//   * the Volterra integro-differential equation with a memory kernel
//     (trapezoidal product integration, implicit trapezoidal step),
//   * the second order ODE equivalent for a Lorentzian reservoir (RK4),
//   * the wide-band (Markovian) solution, evaluated from its phase integral.
// Each call integrates one half-axis; solve_two_sided joins two halves.

#pragma once

#include "decaysim/closedform.hpp"
#include "decaysim/core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace decaysim {

enum class Method { volterra_pc, lorentzian_ode, wideband };

const char* to_string(Method m);

struct SolverConfig {
    double dt{1e-3};       ///< requested step; the effective step divides t_end evenly and is <= dt
    double t_end{1.0};     ///< may be negative
    Method method{Method::volterra_pc};
    double tolerance{1e-8};  ///< accuracy target used by norm and symmetry checks
};

struct Provenance {
    SolverConfig cfg;
    SystemParams params;
    SpectralDensity sd;
};

struct AmplitudeTrajectory {
    std::vector<double> times;  ///< ascending, contains 0
    std::vector<Complex> b0;
    std::vector<Complex> b0_dot;
    Provenance provenance;

    std::size_t size() const noexcept { return times.size(); }
    double survival(std::size_t i) const { return std::norm(b0[i]); }
    std::vector<double> survival() const;
    double max_abs() const;
    /// Index of t = 0.
    std::size_t origin() const;
    /// Linear interpolation of b0 at t (t inside the grid).
    Complex at(double t) const;
};

/// Memory kernel S~(tau). When `exponential_rate` is set the kernel is
/// S~(0) exp(-rate |tau|), which allows an O(1) history update per step.
struct MemoryKernel {
    std::function<Complex(double)> value;
    std::optional<double> exponential_rate;

    static MemoryKernel from(const SpectralDensity& sd, double gamma);
};

// ------------------------------ Resolution rule ------------------------------

/// max(Gamma, Lambda or W, |E0| + |u|, omega).
double resolution_scale(const SystemParams& params, const SpectralDensity& sd);

/// Throws ConfigurationError when dt * resolution_scale > 0.05.
void check_resolution(const SystemParams& params, const SpectralDensity& sd, double dt);

/// Step satisfying the resolution rule with a 2x margin.
double auto_step(const SystemParams& params, const SpectralDensity& sd);

// ---------------------------------- Solvers ----------------------------------

/// b0 on [0, cfg.t_end] (or [cfg.t_end, 0]) for a Lorentzian or Semicircle reservoir.
AmplitudeTrajectory solve_volterra(const SystemParams& params, const SpectralDensity& sd, const DriveProfile& drive,
                                   const SolverConfig& cfg);

/// Same discretization with an arbitrary kernel. Skips the resolution rule.
AmplitudeTrajectory solve_volterra(const SystemParams& params, const MemoryKernel& kernel, const DriveProfile& drive,
                                   const SolverConfig& cfg);

/// RK4 on the second order equation for a Lorentzian reservoir of width lambda,
/// with b0(0) = 1 and db0/dt(0) = -i E0(0).
AmplitudeTrajectory solve_lorentzian_ode(const SystemParams& params, double lambda, const DriveProfile& drive,
                                         const SolverConfig& cfg);

/// Wide-band limit. Sinusoidal drives use the closed-form phase, custom drives
/// a Simpson quadrature of E0(t) and w(t)^2.
AmplitudeTrajectory solve_wideband(const SystemParams& params, const DriveProfile& drive, const SolverConfig& cfg,
                                   closedform::BarrierPhase barrier = closedform::BarrierPhase::exact);

/// Dispatch on cfg.method. For lorentzian_ode `sd` must be Lorentzian.
AmplitudeTrajectory solve(const SystemParams& params, const SpectralDensity& sd, const DriveProfile& drive,
                          const SolverConfig& cfg);

/// Runs [t_min, 0] and [0, t_max] separately and joins them at t = 0.
AmplitudeTrajectory solve_two_sided(const SystemParams& params, const SpectralDensity& sd, const DriveProfile& drive,
                                    SolverConfig cfg, double t_min, double t_max);

AmplitudeTrajectory join(const AmplitudeTrajectory& negative, const AmplitudeTrajectory& positive);

// ------------------------------- Diagnostics ---------------------------------

/// Richardson order estimate log2(max|b_h - b_{h/2}| / max|b_{h/2} - b_{h/4}|)
/// on the common nodes of three runs with halved steps. Returns +inf when the
/// finer difference vanishes. Throws ConfigurationError when the runs differ in
/// anything but the step.
double convergence_order(const AmplitudeTrajectory& coarse, const AmplitudeTrajectory& fine,
                         const AmplitudeTrajectory& finest);

/// log2(err_h / err_{h/2}) against a reference solution.
double convergence_order(const AmplitudeTrajectory& coarse, const AmplitudeTrajectory& fine,
                         const std::function<Complex(double)>& exact);

/// max_i |b0(-t_i) - conj(b0(t_i))| over nodes present on both sides.
double time_reversal_defect(const AmplitudeTrajectory& traj);

}  // namespace decaysim
