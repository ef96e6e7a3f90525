#include "decaysim/spectra.hpp"

#include "decaysim/closedform.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decaysim {

double EnergySpectrum::at(double e) const {
    if (energies.empty() || e < energies.front() || e > energies.back()) return 0.0;
    const auto it = std::lower_bound(energies.begin(), energies.end(), e);
    const auto k = static_cast<std::size_t>(it - energies.begin());
    if (k == 0 || energies[k] == e) return values[k];
    const double s = (e - energies[k - 1]) / (energies[k] - energies[k - 1]);
    return (1.0 - s) * values[k - 1] + s * values[k];
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigurationError("trapezoid: size mismatch");
    double s = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) s += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    return s;
}

namespace {

std::vector<double> predicted_peaks(const SystemParams& params, int& n_max, double& omega) {
    n_max = 0;
    omega = 0.0;
    if (params.level_drive && params.barrier_drive)
        throw ConfigurationError("energy grids support at most one drive");
    if (params.level_drive || params.barrier_drive) {
        const auto f = params.level_drive ? closedform::FloquetSpectrum::level(params)
                                          : closedform::FloquetSpectrum::barrier(params);
        n_max = f.n_max();
        omega = f.omega();
        return f.sublevels(1e-3);
    }
    return {params.e0};
}

}  // namespace

std::vector<double> default_energy_grid(const SystemParams& params, int points, int refine) {
    params.validate();
    if (points < 2 || refine < 1) throw ConfigurationError("default_energy_grid: need points >= 2 and refine >= 1");
    int n_max = 0;
    double omega = 0.0;
    const std::vector<double> peaks = predicted_peaks(params, n_max, omega);
    const double g = params.gamma;
    const double half = 8.0 * g + n_max * omega;
    const double lo = params.e0 - half;
    const double hi = params.e0 + half;
    const double step = (hi - lo) / (points - 1);

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) grid.push_back(lo + k * step);
    const double fine = step / refine;
    for (double p : peaks) {
        const double a = std::max(lo, p - g);
        const double b = std::min(hi, p + g);
        for (double e = a; e <= b; e += fine) grid.push_back(e);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(), [&](double x, double y) { return y - x < 1e-6 * fine; }),
               grid.end());
    return grid;
}

EnergySpectrum spectrum_from_trajectory(const AmplitudeTrajectory& traj, const DriveProfile& drive,
                                        const SpectralDensity& sd, const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigurationError("spectrum_from_trajectory: empty energy grid");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigurationError("spectrum_from_trajectory: grid must be ascending");
    const std::size_t o = traj.origin();
    const std::size_t n = traj.size() - o;  // nodes on [0, t]
    const double gamma = traj.provenance.params.gamma;
    const double e0 = traj.provenance.params.e0;

    EnergySpectrum out;
    out.energies = grid;
    out.values.assign(grid.size(), 0.0);
    out.time = traj.times.back();
    if (out.time < 0.0) throw ConfigurationError("spectrum_from_trajectory: trajectory must end at t >= 0");
    if (n < 2) return out;

    const double h = traj.times[o + 1] - traj.times[o];
    const double e_abs = std::max(std::abs(grid.front()), std::abs(grid.back()));
    if (h * e_abs > 0.2) {
        std::ostringstream os;
        os << "grid resolution: dt * max|E| = " << h * e_abs << " > 0.2";
        throw ConfigurationError(os.str());
    }

    std::vector<Complex> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = drive.w_of_t(traj.times[o + k]) * traj.b0[o + k];
    f.front() *= 0.5;
    f.back() *= 0.5;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = grid[i];
        const double s = spectral_density_at(sd, e, gamma);
        if (s == 0.0) continue;
        // Phases e^{i E t_k} by recurrence, re-anchored to bound rounding drift.
        const Complex rot = std::polar(1.0, e * h);
        Complex ph{1.0, 0.0};
        Complex acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            if (k % 256 == 0) ph = std::polar(1.0, e * traj.times[o + k]);
            acc += f[k] * ph;
            ph *= rot;
        }
        out.values[i] = s * std::norm(h * acc);
    }
    out.norm = trapezoid(out.energies, out.values);

    // Beyond the grid, with g(t) = f(t) e^{i E0 t} slowly varying and d = E - E0,
    // A(E) ~ (g(t) e^{i d t} - g(0)) / (i d), so
    // |A|^2 ~ (|g(0)|^2 + |g(t)|^2 - 2 Re[g(t) conj(g(0)) e^{i d t}]) / d^2.
    const double t = out.time;
    const Complex g0 = 2.0 * f.front();
    const Complex gt = 2.0 * f.back() * std::polar(1.0, e0 * t);
    const double ends = std::norm(g0) + std::norm(gt);
    const Complex cross = gt * std::conj(g0);
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    const auto side = [&](double a, double sign) {
        // y >= 0 measures the distance beyond the grid edge at |d| = a.
        const auto h_of = [&](double y) {
            const double d = a + y;
            return spectral_density_at(sd, e0 + sign * d, gamma) / (d * d);
        };
        const double mean = gauss_kronrod<double, 61>::integrate(h_of, 0.0, inf, 15, 1e-10);
        boost::math::quadrature::ooura_fourier_cos<double> fcos;
        boost::math::quadrature::ooura_fourier_sin<double> fsin;
        const double c = fcos.integrate(h_of, t).first;
        const double s = fsin.integrate(h_of, t).first;
        const double phi = t * a + sign * std::arg(cross);
        return ends * mean - 2.0 * std::abs(cross) * (std::cos(phi) * c - std::sin(phi) * s);
    };
    double tail = 0.0;
    if (grid.back() > e0) tail += side(grid.back() - e0, 1.0);
    if (grid.front() < e0) tail += side(e0 - grid.front(), -1.0);
    out.tail = tail;
    return out;
}

EnergySpectrum spectrum_asymptotic(const SystemParams& params, DriveKind kind, const std::vector<double>& grid,
                                   closedform::BarrierPhase barrier) {
    params.validate();
    EnergySpectrum out;
    out.energies = grid;
    out.values.resize(grid.size());
    switch (kind) {
        case DriveKind::none: {
            for (std::size_t i = 0; i < grid.size(); ++i)
                out.values[i] = closedform::lineshape_markovian(params, grid[i], out.time);
            break;
        }
        case DriveKind::level:
        case DriveKind::barrier: {
            const auto f = kind == DriveKind::level ? closedform::FloquetSpectrum::level(params)
                                                    : closedform::FloquetSpectrum::barrier(params, 1e-10, barrier);
            for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid[i]);
            break;
        }
    }
    out.norm = trapezoid(out.energies, out.values);
    if (!grid.empty()) {
        const double g = params.gamma / (2.0 * pi);
        if (grid.back() > params.e0) out.tail += g / (grid.back() - params.e0);
        if (grid.front() < params.e0) out.tail += g / (params.e0 - grid.front());
    }
    return out;
}

std::vector<std::size_t> spectrum_peaks(const EnergySpectrum& s, double rel_height) {
    std::vector<std::size_t> idx;
    if (s.values.size() < 3) return idx;
    const double top = *std::max_element(s.values.begin(), s.values.end());
    for (std::size_t k = 1; k + 1 < s.values.size(); ++k)
        if (s.values[k] >= s.values[k - 1] && s.values[k] > s.values[k + 1] && s.values[k] >= rel_height * top)
            idx.push_back(k);
    return idx;
}

}  // namespace decaysim
