// test_spectra.cpp — Energy spectra from trajectories and their long-time limits

#include "catch_amalgamated.hpp"

#include "decaysim/closedform.hpp"
#include "decaysim/spectra.hpp"
#include "decaysim/timesolver.hpp"

#include <cmath>

using namespace decaysim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemParams params(double e0, std::optional<LevelDrive> lev = std::nullopt, std::optional<BarrierDrive> bar = std::nullopt) {
    return SystemParams{e0, 1.0, lev, bar};
}

AmplitudeTrajectory wideband_run(const SystemParams& p, double t, double dt = 1e-3) {
    return solve(p, WideBand{}, DriveProfile::from(p), {dt, t, Method::wideband, 1e-8});
}

double peak_height_near(const EnergySpectrum& s, double e, double window) {
    double m = 0.0;
    for (std::size_t k = 0; k < s.energies.size(); ++k)
        if (std::abs(s.energies[k] - e) <= window) m = std::max(m, s.values[k]);
    return m;
}

}  // namespace

TEST_CASE("trapezoid and interpolation helpers", "[spectra]") {
    const std::vector<double> x{0.0, 1.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 1.0};
    CHECK(trapezoid(x, y) == 6.0);
    CHECK(trapezoid({}, {}) == 0.0);
    CHECK_THROWS_AS(trapezoid(x, {1.0}), ConfigurationError);

    EnergySpectrum s;
    s.energies = x;
    s.values = y;
    CHECK(s.at(0.5) == 2.0);
    CHECK(s.at(2.0) == 2.0);
    CHECK(s.at(-1.0) == 0.0);
    s.norm = 6.0;
    s.tail = 0.5;
    CHECK(s.total() == 6.5);
}

TEST_CASE("energy grid", "[spectra]") {
    const SystemParams p = params(1.0);
    const auto g = default_energy_grid(p, 401, 5);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
    CHECK_THAT(g.front(), WithinAbs(-7.0, 1e-12));
    CHECK_THAT(g.back(), WithinAbs(9.0, 1e-12));
    // The peak region is refined fivefold.
    const auto near = std::lower_bound(g.begin(), g.end(), 1.0);
    CHECK(*(near + 1) - *near < 0.04 / 4.0);
    CHECK(g.size() > 401);

    const auto gl = default_energy_grid(params(0.0, LevelDrive{3.0, 2.0}), 401, 5);
    CHECK(gl.back() - gl.front() > 16.0 + 4.0 * 2.0);
    CHECK_THROWS_AS(default_energy_grid(p, 1), ConfigurationError);
}

TEST_CASE("spectrum of the initial state vanishes", "[spectra]") {
    const SystemParams p = params(1.0);
    const auto tr = wideband_run(p, 0.0);
    const EnergySpectrum s = spectrum_from_trajectory(tr, DriveProfile::from(p), WideBand{}, default_energy_grid(p, 201));
    CHECK(s.time == 0.0);
    for (double v : s.values) CHECK(v == 0.0);
    CHECK(s.total() == 0.0);
}

TEST_CASE("static spectrum equals the wide-band line shape", "[spectra][oracle]") {
    const SystemParams p = params(1.0);
    for (double t : {0.5, 3.0}) {
        const auto tr = wideband_run(p, t);
        const auto grid = default_energy_grid(p, 801);
        const EnergySpectrum s = spectrum_from_trajectory(tr, DriveProfile::from(p), WideBand{}, grid);
        double m = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
            m = std::max(m, std::abs(s.values[k] - closedform::lineshape_markovian(p, grid[k], t)));
        CHECK(m < 1e-4 * closedform::lineshape_markovian(p, 1.0, t));
    }
}

TEST_CASE("probability conservation", "[spectra][property]") {
    const SystemParams cases[] = {params(1.0), params(0.0, LevelDrive{3.0, 2.0}), params(3.0, LevelDrive{3.0, 2.0}),
                                  params(1.0, std::nullopt, BarrierDrive{0.1, 2.0})};
    for (const SystemParams& p : cases) {
        const auto grid = default_energy_grid(p, 4001);
        for (double t : {1.0, 3.0, 12.0}) {
            const auto tr = wideband_run(p, t);
            const EnergySpectrum s = spectrum_from_trajectory(tr, DriveProfile::from(p), WideBand{}, grid);
            INFO("E0 = " << p.e0 << ", t = " << t);
            CHECK_THAT(s.total(), WithinAbs(1.0 - tr.survival(tr.size() - 1), 1e-3));
            CHECK(s.tail > 0.0);
        }
    }
}

TEST_CASE("trajectory spectra approach the Floquet limit", "[spectra][oracle]") {
    const SystemParams lev = params(0.0, LevelDrive{3.0, 2.0});
    const auto grid = default_energy_grid(lev, 4001);
    const auto tr = wideband_run(lev, 12.0);
    const EnergySpectrum s = spectrum_from_trajectory(tr, DriveProfile::from(lev), WideBand{}, grid);
    const EnergySpectrum a = spectrum_asymptotic(lev, DriveKind::level, grid);
    for (int n = -2; n <= 2; ++n) {
        const double e = 2.0 * n;
        const double ha = peak_height_near(a, e, 0.5);
        if (ha < 0.05 * *std::max_element(a.values.begin(), a.values.end())) continue;
        INFO("sub-level " << n);
        CHECK_THAT(peak_height_near(s, e, 0.5), WithinRel(ha, 1e-2));
    }
    CHECK(spectrum_peaks(s, 0.05).size() == spectrum_peaks(a, 0.05).size());
}

TEST_CASE("spectrum grid resolution rule", "[spectra]") {
    const SystemParams p = params(1.0);
    const auto tr = wideband_run(p, 2.0, 0.02);
    const std::vector<double> wide{-20.0, 0.0, 20.0};
    CHECK_THROWS_AS(spectrum_from_trajectory(tr, DriveProfile::from(p), WideBand{}, wide), ConfigurationError);
    CHECK_THROWS_AS(spectrum_from_trajectory(tr, DriveProfile::from(p), WideBand{}, {}), ConfigurationError);
    CHECK_THROWS_AS(spectrum_from_trajectory(tr, DriveProfile::from(p), WideBand{}, {1.0, 0.0}), ConfigurationError);
    const auto back = solve(p, WideBand{}, DriveProfile::from(p), {0.01, -2.0, Method::wideband, 1e-8});
    // A backward run ends at t = 0, where nothing has tunneled yet.
    CHECK(spectrum_from_trajectory(back, DriveProfile::from(p), WideBand{}, {0.0, 1.0}).total() == 0.0);
}

TEST_CASE("long-time spectra", "[spectra]") {
    const SystemParams p = params(0.5);
    const auto grid = default_energy_grid(p, 4001);

    // Without a drive the limit is a unit-norm Lorentzian at E0.
    const EnergySpectrum none = spectrum_asymptotic(p, DriveKind::none, grid);
    CHECK_THAT(none.at(0.5), WithinRel(2.0 / pi, 1e-12));
    CHECK_THAT(none.at(1.0), WithinRel(1.0 / pi, 1e-12));
    CHECK_THAT(none.total(), WithinAbs(1.0, 1e-4));

    // A vanishing drive amplitude leaves the Lorentzian.
    const SystemParams still = params(0.5, LevelDrive{0.0, 2.0});
    const EnergySpectrum l0 = spectrum_asymptotic(still, DriveKind::level, grid);
    for (std::size_t k = 0; k < grid.size(); k += 50) CHECK_THAT(l0.values[k], WithinAbs(none.values[k], 1e-14));

    const SystemParams lev = params(0.5, LevelDrive{3.0, 2.0});
    const auto gl = default_energy_grid(lev, 4001);
    const EnergySpectrum sl = spectrum_asymptotic(lev, DriveKind::level, gl);
    CHECK_THAT(sl.total(), WithinAbs(1.0, 1e-3));
    // Peaks sit near E0 + n omega; neighbouring sub-levels of width Gamma pull them slightly.
    for (std::size_t k : spectrum_peaks(sl, 0.05)) {
        const double n = (sl.energies[k] - 0.5) / 2.0;
        CHECK_THAT(n, WithinAbs(std::round(n), 0.1));
    }

    // The exact width integral keeps unit norm; the first order form overshoots by O(alpha^2).
    const SystemParams bar = params(0.5, std::nullopt, BarrierDrive{0.1, 2.0});
    const auto gb = default_energy_grid(bar, 4001);
    const EnergySpectrum ex = spectrum_asymptotic(bar, DriveKind::barrier, gb, closedform::BarrierPhase::exact);
    const EnergySpectrum li = spectrum_asymptotic(bar, DriveKind::barrier, gb, closedform::BarrierPhase::linear);
    CHECK_THAT(ex.total(), WithinAbs(1.0, 1e-3));
    CHECK(li.total() > ex.total());
    CHECK(ex.at(0.5) < li.at(0.5));
}

TEST_CASE("barrier drive feeds the upper side band more than a level drive", "[spectra]") {
    // alpha = u = omega = 0.2, E0 = 0.
    const SystemParams lev = params(0.0, LevelDrive{0.2, 0.2});
    const SystemParams bar = params(0.0, std::nullopt, BarrierDrive{0.2, 0.2});
    std::vector<double> grid;
    for (int k = 0; k <= 4000; ++k) grid.push_back(-2.0 + 1e-3 * k);
    const EnergySpectrum sl = spectrum_asymptotic(lev, DriveKind::level, grid);
    const EnergySpectrum sb = spectrum_asymptotic(bar, DriveKind::barrier, grid);
    CHECK(sb.at(0.2) > sl.at(0.2));
    // Single merged peaks since omega << Gamma; the barrier one stays at E0.
    CHECK(spectrum_peaks(sl).size() == 1);
    REQUIRE(spectrum_peaks(sb).size() == 1);
    CHECK_THAT(sb.energies[spectrum_peaks(sb).front()], WithinAbs(0.0, 0.02));
}

TEST_CASE("peak finder", "[spectra]") {
    EnergySpectrum s;
    for (int k = 0; k <= 400; ++k) {
        const double e = -2.0 + 0.01 * k;
        s.energies.push_back(e);
        s.values.push_back(std::exp(-50.0 * (e + 1.0) * (e + 1.0)) + 0.5 * std::exp(-50.0 * (e - 1.0) * (e - 1.0)) +
                           1e-4 * std::exp(-50.0 * e * e));
    }
    const auto pk = spectrum_peaks(s);
    REQUIRE(pk.size() == 2);
    CHECK_THAT(s.energies[pk[0]], WithinAbs(-1.0, 1e-9));
    CHECK_THAT(s.energies[pk[1]], WithinAbs(1.0, 1e-9));
    CHECK(spectrum_peaks(s, 1e-6).size() == 3);
}
