// closedform.hpp — Analytic amplitudes, line shapes and Floquet spectra
//
// These are both fast evaluation paths and the oracles the numerical solvers
// are checked against. Time arguments are signed: negative times describe the
// formation of the localized state from the continuum.

#pragma once

#include "decaysim/core.hpp"

#include <utility>
#include <vector>

namespace decaysim::closedform {

/// How the O(alpha^2) part of w(t)^2 enters the wide-band width integral.
enum class BarrierPhase {
    exact,   ///< integrate (1 + alpha sin wt)^2 exactly
    linear,  ///< keep only terms linear in alpha
};

/// Accumulated complex phase  E0(t) t = \int_0^t [E0(t') - i (Gamma/2) w(t')^2 sgn(t)] dt'
/// of the wide-band solution b0(t) = exp(-i E0(t) t). Imaginary part is <= 0.
class WidebandPhase {
public:
    /// Throws ConfigurationError if both drives are present.
    explicit WidebandPhase(SystemParams params, BarrierPhase barrier = BarrierPhase::exact);

    Complex operator()(double t) const;

    const SystemParams& params() const noexcept { return params_; }

private:
    SystemParams params_;
    BarrierPhase barrier_;
};

/// Q = sqrt(Lambda^2 - 2 Gamma Lambda - E0^2 - 2 i sgn(t) E0 Lambda) on the
/// principal branch (Re Q >= 0).
struct LorentzianQ {
    Complex q;
    double branch_sign;  ///< sgn(t) used to build q
};

LorentzianQ lorentzian_q(const SystemParams& params, double lambda, double t);

/// e^{-i E0 t - Gamma |t| / 2}.
Complex b0_markovian_static(const SystemParams& params, double t);

/// exp(-i E0(t) t) for at most one sinusoidal drive.
Complex b0_markovian_driven(const SystemParams& params, double t, BarrierPhase barrier = BarrierPhase::exact);

/// Static Lorentzian-reservoir amplitude: cosh/sinh solution of the second
/// order equation. The Q -> 0 degeneracy is handled through sinh(z)/z.
Complex b0_lorentzian_static(const SystemParams& params, double lambda, double t);

/// Coefficients of P0 = 1 - c2 t^2 + c3 |t|^3 + O(t^4): (Gamma Lambda / 2, Gamma Lambda^2 / 6).
std::pair<double, double> short_time_coefficients(const SystemParams& params, double lambda);

/// Wide-band static line shape P_r(t); pass t = +inf for the Lorentzian limit.
double lineshape_markovian(const SystemParams& params, double e_r, double t);

/// Long-time energy spectrum of the tunneled particle under a periodic drive.
/// Coefficients are computed once; evaluation is a truncated Floquet sum.
class FloquetSpectrum {
public:
    /// Oscillating level: (Gamma/2pi) |sum_n (-i)^n J_n(u/w) / (E - E0 - n w + i Gamma/2)|^2.
    static FloquetSpectrum level(const SystemParams& params, double tolerance = 1e-10);

    /// Oscillating barrier (xi = alpha Gamma / w):
    /// (Gamma/2pi) |sum_n e^{-xi} I_n(xi) [1/z_n + i alpha w / (z_n^2 - w^2)]|^2,
    /// z_n = E - E0 - n w + i Gamma/2.
    /// This is the long-time limit for the width integral kept to first order
    /// in alpha; it integrates to 1 + O(alpha^2). With BarrierPhase::exact the
    /// alpha^2 terms of w(t)^2 are kept: the width becomes Gamma (1 + alpha^2/2)
    /// and the weights are convolved with (-i)^m I_m(Gamma alpha^2 / 8w) at
    /// harmonics 2m, which restores unit norm.
    static FloquetSpectrum barrier(const SystemParams& params, double tolerance = 1e-10,
                                   BarrierPhase phase = BarrierPhase::linear);

    double operator()(double e_r) const;

    double omega() const noexcept { return omega_; }
    int n_max() const noexcept { return n_max_; }
    /// Sub-level energies E0 + n w carrying weight above `rel_weight` of the largest.
    std::vector<double> sublevels(double rel_weight = 1e-6) const;

private:
    FloquetSpectrum() = default;

    double e0_{0.0};
    double gamma_{1.0};
    double omega_{1.0};
    double alpha_{0.0};
    double width_{1.0};  // total decay width entering z_n
    int n_max_{0};
    std::vector<Complex> coeff_;  // index n + n_max
    bool barrier_{false};
};

double floquet_spectrum_level(const SystemParams& params, double e_r);
double floquet_spectrum_barrier(const SystemParams& params, double e_r);

/// \int P(E) dE over the whole real line by adaptive Gauss-Kronrod, split at
/// the given peak positions. `width` sets the refinement scale near peaks.
double integrate_spectrum(const std::function<double(double)>& density, const std::vector<double>& peaks,
                          double width, double tolerance = 1e-10);

}  // namespace decaysim::closedform
