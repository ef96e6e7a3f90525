// acceptance.cpp — End-to-end acceptance run: one PASS/FAIL line per criterion

#include "decaysim/chain.hpp"
#include "decaysim/closedform.hpp"
#include "decaysim/spectra.hpp"
#include "decaysim/timesolver.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace decaysim;

namespace {

struct Verdict {
    bool passed{true};
    std::ostringstream detail;
    std::vector<std::string> notes;  // printed below the verdict line

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* title, double runtime_limit, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.passed = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (runtime_limit > 0.0) v.require(secs < runtime_limit, "runtime limit " + std::to_string(runtime_limit) + " s");
    if (!v.passed) ++failures;
    std::printf("%s  %2d  %s  (%.2f s)  %s\n", v.passed ? "PASS" : "FAIL", id, title, secs, v.detail.str().c_str());
    for (const auto& n : v.notes) std::printf("      info: %s\n", n.c_str());
    std::fflush(stdout);
}

SystemParams params(double e0, std::optional<LevelDrive> lev = std::nullopt, std::optional<BarrierDrive> bar = std::nullopt) {
    return SystemParams{e0, 1.0, lev, bar};
}

double max_rel_gap_at(const EnergySpectrum& got, const EnergySpectrum& want, const std::vector<std::size_t>& idx) {
    double m = 0.0;
    for (std::size_t k : idx) m = std::max(m, std::abs(got.values[k] / want.values[k] - 1.0));
    return m;
}

// Local maximum closest to energy e.
std::size_t peak_closest_to(const EnergySpectrum& s, double e) {
    const auto pk = spectrum_peaks(s, 0.0);
    if (pk.empty()) throw NumericalError("spectrum has no local maximum");
    return *std::min_element(pk.begin(), pk.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(s.energies[a] - e) < std::abs(s.energies[b] - e);
    });
}

}  // namespace

int main() {
    const double tol = 1e-8;

    criterion(1, "Markovian static law", 10.0, [&](Verdict& v) {
        const SystemParams p = params(1.0);
        const DriveProfile d = DriveProfile::from(p);
        const auto wb = solve_two_sided(p, WideBand{}, d, {1e-3, 5.0, Method::wideband, tol}, -5.0, 5.0);
        double wb_err = 0.0;
        for (std::size_t k = 0; k < wb.size(); ++k)
            wb_err = std::max(wb_err, std::abs(wb.survival(k) - std::exp(-std::abs(wb.times[k]))));
        v.detail << "wideband max|P0 - e^-|t|| = " << wb_err;
        v.require(wb_err <= 1e-12, "wideband closed form to 1e-12");

        const Lorentzian lz{1e3};
        const auto vol = solve_two_sided(p, lz, d, {auto_step(p, lz), 5.0, Method::volterra_pc, tol}, -5.0, 5.0);
        double rel = 0.0;
        for (std::size_t k = 0; k < vol.size(); ++k) {
            const double t = std::abs(vol.times[k]);
            if (t < 0.1) continue;
            rel = std::max(rel, std::abs(vol.survival(k) / std::exp(-t) - 1.0));
        }
        v.detail << ", Volterra(Lambda=1000) max rel dev = " << rel;
        v.require(rel < 1e-2, "Volterra within 1e-2 relative");
    });

    criterion(2, "Lorentzian oracle triangle", 30.0, [&](Verdict& v) {
        double worst = 0.0;
        for (double e0 : {0.0, 1.0, 3.0}) {
            const SystemParams p = params(e0);
            const DriveProfile d = DriveProfile::from(p);
            const double dt = 2.5e-3;
            const auto vol = solve_two_sided(p, Lorentzian{4.0}, d, {dt, 6.0, Method::volterra_pc, tol}, -6.0, 6.0);
            const auto ode = solve_two_sided(p, Lorentzian{4.0}, d, {dt, 6.0, Method::lorentzian_ode, tol}, -6.0, 6.0);
            for (std::size_t k = 0; k < vol.size(); ++k) {
                const double pc = std::norm(closedform::b0_lorentzian_static(p, 4.0, vol.times[k]));
                worst = std::max({worst, std::abs(vol.survival(k) - pc), std::abs(ode.survival(k) - pc),
                                  std::abs(vol.survival(k) - ode.survival(k))});
            }
        }
        v.detail << "max pairwise |dP0| = " << worst;
        v.require(worst < 1e-5, "pairwise agreement 1e-5");
    });

    criterion(3, "Short-time expansion", 0.0, [&](Verdict& v) {
        double worst = 0.0;
        for (double lam : {2.0, 4.0}) {
            for (double e0 : {0.0, 1.0, 3.0}) {
                const SystemParams p = params(e0);
                const auto tr = solve(p, Lorentzian{lam}, DriveProfile::from(p), {1e-4, 0.02, Method::lorentzian_ode, tol});
                const auto n = static_cast<Eigen::Index>(tr.size() - 1);
                // 1 - P0 = c2 t^2 - c3 t^3 + c4 t^4; c4 absorbs the O(t^4) remainder.
                Eigen::MatrixXd a(n, 3);
                Eigen::VectorXd y(n);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double t = tr.times[static_cast<std::size_t>(k + 1)];
                    a.row(k) << t * t, -t * t * t, t * t * t * t;
                    y(k) = 1.0 - tr.survival(static_cast<std::size_t>(k + 1));
                }
                const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
                const auto [c2, c3] = closedform::short_time_coefficients(p, lam);
                worst = std::max({worst, std::abs(c(0) / c2 - 1.0), std::abs(c(1) / c3 - 1.0)});
            }
        }
        v.detail << "max relative coefficient error = " << worst;
        v.require(worst < 1e-2, "coefficients within 1%");
    });

    criterion(4, "Finite-chain revival (W=6, E0=1)", 60.0, [&](Verdict& v) {
        const SystemParams p = params(1.0);
        const double dt = 0.025 / 7.0;
        std::optional<double> trev[2];
        int i = 0;
        for (int n : {150, 250}) {
            const ChainModel m = ChainModel::build(FiniteChain{n, 6.0}, p);
            const ChainSeries s = evolve_chain(m, DriveProfile::from(p), 100.0, dt);
            trev[i++] = revival_time(s);
            if (n == 250) {
                double dev = 0.0;
                for (std::size_t k = 0; k < s.times.size() && s.times[k] <= 5.0; ++k)
                    dev = std::max(dev, std::abs(std::norm(s.b0[k]) - std::exp(-s.times[k])));
                v.detail << "N=250 max|P0 - e^-t| (t<=5) = " << dev;
                v.require(dev < 0.05, "deviation below 0.05");
            }
        }
        v.detail << ", t_rev(150) = " << (trev[0] ? *trev[0] : -1.0) << ", t_rev(250) = " << (trev[1] ? *trev[1] : -1.0);
        v.require(trev[0].has_value() && trev[1].has_value(), "finite revival times");
        v.require(trev[0] && trev[1] && *trev[1] > *trev[0], "t_rev(250) > t_rev(150)");
    });

    // P0 at t = 4 with and without a drive, from both Lorentzian solvers.
    const auto ordering = [&](Verdict& v, const std::function<void(SystemParams&)>& drive, bool zeno_at_zero) {
        for (Method m : {Method::lorentzian_ode, Method::volterra_pc}) {
            for (double e0 : {3.0, 0.0}) {
                SystemParams driven = params(e0);
                drive(driven);
                const SystemParams still = params(e0);
                const SolverConfig cfg{2.5e-3, 6.0, m, tol};
                const double pd = std::norm(solve(driven, Lorentzian{4.0}, DriveProfile::from(driven), cfg).at(4.0));
                const double ps = std::norm(solve(still, Lorentzian{4.0}, DriveProfile::from(still), cfg).at(4.0));
                v.detail << to_string(m) << " E0=" << e0 << ": " << pd << (pd < ps ? " < " : " >= ") << ps << "; ";
                const bool slower = e0 == 0.0 && zeno_at_zero;
                v.require(slower ? pd > ps : pd < ps, std::string(to_string(m)) + " E0=" + std::to_string(e0));
            }
        }
    };

    criterion(5, "Oscillating level: anti-Zeno at E0=3, Zeno at E0=0", 0.0, [&](Verdict& v) {
        ordering(v, [](SystemParams& p) { p.level_drive = LevelDrive{3.0, 2.0}; }, true);
    });

    criterion(6, "Oscillating barrier speeds up the decay", 0.0, [&](Verdict& v) {
        ordering(v, [](SystemParams& p) { p.barrier_drive = BarrierDrive{0.1, 2.0}; }, false);
    });

    criterion(7, "Floquet spectrum consistency at t=12", 60.0, [&](Verdict& v) {
        const SystemParams lev = params(0.0, LevelDrive{3.0, 2.0});
        const SystemParams bar = params(0.0, std::nullopt, BarrierDrive{0.1, 2.0});
        for (const auto& [p, kind, name] : {std::tuple{lev, DriveKind::level, "level"}, std::tuple{bar, DriveKind::barrier, "barrier"}}) {
            const auto grid = default_energy_grid(p, 4001);
            const DriveProfile d = DriveProfile::from(p);
            // The long-time barrier formula follows the width integral kept to first order in alpha.
            const auto tr = solve_wideband(p, d, {1e-3, 12.0, Method::wideband, tol}, closedform::BarrierPhase::linear);
            const EnergySpectrum s = spectrum_from_trajectory(tr, d, WideBand{}, grid);
            const EnergySpectrum a = spectrum_asymptotic(p, kind, grid, closedform::BarrierPhase::linear);
            const auto peaks = spectrum_peaks(a, 0.0);
            const double gap = max_rel_gap_at(s, a, peaks);
            const double total = closedform::integrate_spectrum(
                kind == DriveKind::level ? std::function<double(double)>(closedform::FloquetSpectrum::level(p))
                                         : std::function<double(double)>(closedform::FloquetSpectrum::barrier(p)),
                {-4.0, -2.0, 0.0, 2.0, 4.0}, 1.0);
            v.detail << name << ": " << peaks.size() << " local maxima, max rel gap " << gap << ", integral " << total << "; ";
            v.require(gap < 1e-2, std::string(name) + " peaks within 1%");
            v.require(std::abs(total - 1.0) <= 1e-3, std::string(name) + " integral 1 +- 1e-3");
        }
        const double exact = closedform::integrate_spectrum(
            closedform::FloquetSpectrum::barrier(bar, 1e-10, closedform::BarrierPhase::exact), {-4.0, -2.0, 0.0, 2.0, 4.0}, 1.0);
        v.notes.push_back("barrier spectrum with the exact width integral integrates to " + std::to_string(exact));
    });

    criterion(8, "Barrier vs level spectra at alpha = u = omega = 0.2", 0.0, [&](Verdict& v) {
        const SystemParams lev = params(0.0, LevelDrive{0.2, 0.2});
        const SystemParams bar = params(0.0, std::nullopt, BarrierDrive{0.2, 0.2});
        const auto fl = closedform::FloquetSpectrum::level(lev);
        const auto fb = closedform::FloquetSpectrum::barrier(bar);
        for (double e : {0.2, -0.2}) {
            v.detail << "E=" << e << ": barrier " << fb(e) << " vs level " << fl(e) << "; ";
            v.require(fb(e) > fl(e), "barrier side peak above level at E=" + std::to_string(e));
        }
        EnergySpectrum sl, sb;
        std::vector<double> grid;
        for (int k = 0; k <= 4000; ++k) grid.push_back(-2.0 + 1e-3 * k);
        sl = spectrum_asymptotic(lev, DriveKind::level, grid);
        sb = spectrum_asymptotic(bar, DriveKind::barrier, grid);
        const std::size_t il = peak_closest_to(sl, 0.0);
        const std::size_t ib = peak_closest_to(sb, 0.0);
        const double cl = sl.values[il];
        const double cb = sb.values[ib];
        v.detail << "; central peaks: barrier " << cb << " at E=" << sb.energies[ib] << ", level " << cl << " at E="
                 << sl.energies[il] << " (" << 100.0 * std::abs(cb / cl - 1.0) << "%)";
        v.require(std::abs(cb / cl - 1.0) < 0.05, "central peaks within 5%");
        v.notes.push_back("values at E = E0: barrier " + std::to_string(fb(0.0)) + ", level " + std::to_string(fl(0.0)) + " (" +
             std::to_string(100.0 * std::abs(fb(0.0) / fl(0.0) - 1.0)) + "%)");
    });

    criterion(9, "Time reversal of static runs", 0.0, [&](Verdict& v) {
        double worst = 0.0;
        for (double e0 : {0.0, 1.0, 3.0}) {
            const SystemParams p = params(e0);
            const DriveProfile d = DriveProfile::from(p);
            const auto run = [&](const SpectralDensity& sd, Method m) {
                return time_reversal_defect(solve_two_sided(p, sd, d, {auto_step(p, sd), 6.0, m, tol}, -6.0, 6.0));
            };
            worst = std::max({worst, run(WideBand{}, Method::wideband), run(Lorentzian{4.0}, Method::volterra_pc),
                              run(Lorentzian{4.0}, Method::lorentzian_ode), run(Semicircle{6.0}, Method::volterra_pc)});
            // Chain: b0(-t) under H is b0(t) under -H.
            const ChainModel fwd = ChainModel::build(FiniteChain{250, 6.0}, p);
            ChainModel rev = fwd;
            rev.e0 = -rev.e0;
            for (double& e : rev.energies) e = -e;
            for (double& c : rev.couplings) c = -c;
            const double dt = 0.05 / (6.0 + e0) / 2.0;
            const ChainSeries a = evolve_chain(fwd, d, 6.0, dt);
            const ChainSeries b = evolve_chain(rev, DriveProfile::from(params(-e0)), 6.0, dt);
            for (std::size_t k = 0; k < a.b0.size(); ++k) worst = std::max(worst, std::abs(b.b0[k] - std::conj(a.b0[k])));
        }
        v.detail << "max |b0(-t) - conj b0(t)| = " << worst << " (tolerance " << 10.0 * tol << ")";
        v.require(worst < 10.0 * tol, "defect below 10 x tolerance");
    });

    criterion(10, "Probability conservation", 0.0, [&](Verdict& v) {
        double worst = 0.0;
        const SystemParams cases[] = {params(1.0), params(1.0, LevelDrive{3.0, 2.0}),
                                      params(1.0, std::nullopt, BarrierDrive{0.1, 2.0})};
        for (const SystemParams& p : cases) {
            const auto grid = default_energy_grid(p, 4001);
            const DriveProfile d = DriveProfile::from(p);
            for (double t : {1.0, 3.0, 12.0}) {
                const auto tr = solve(p, WideBand{}, d, {1e-3, t, Method::wideband, tol});
                const EnergySpectrum s = spectrum_from_trajectory(tr, d, WideBand{}, grid);
                worst = std::max(worst, std::abs(tr.survival(tr.size() - 1) + s.total() - 1.0));
            }
        }
        v.detail << "wideband max|P0 + int P_r - 1| = " << worst;
        v.require(worst < 1e-3, "wideband conservation 1e-3");

        double drift = 0.0;
        for (const SystemParams& p : cases) {
            const ChainModel m = ChainModel::build(FiniteChain{250, 6.0}, p);
            const double t_end = 20.0;
            const ChainSeries s = evolve_chain(m, DriveProfile::from(p), t_end, 0.05 / (6.0 + 4.0) / 2.0);
            for (std::size_t k = 1; k < s.norm_times.size(); ++k)
                drift = std::max(drift, std::abs(s.norm[k] - 1.0) / s.norm_times[k]);
        }
        v.detail << ", chain max norm drift per unit t = " << drift;
        v.require(drift < 1e-8, "chain norm 1e-8 per unit t");
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
