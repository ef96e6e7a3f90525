#include "decaysim/core.hpp"

#include "decaysim/specfun.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace decaysim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigurationError(what);
}

}  // namespace

void SystemParams::validate() const {
    require(std::isfinite(e0), "e0 must be finite");
    require(gamma > 0.0 && std::isfinite(gamma), "gamma must be > 0");
    if (level_drive) {
        require(std::isfinite(level_drive->u), "level drive amplitude u must be finite");
        require(level_drive->omega > 0.0, "level drive omega must be > 0");
    }
    if (barrier_drive) {
        require(barrier_drive->alpha >= 0.0, "barrier drive alpha must be >= 0");
        require(barrier_drive->omega > 0.0, "barrier drive omega must be > 0");
    }
}

DriveProfile DriveProfile::from(const SystemParams& params) {
    DriveProfile d;
    const double e0 = params.e0;
    if (params.level_drive) {
        const double u = params.level_drive->u;
        const double om = params.level_drive->omega;
        d.e0_of_t = [=](double t) { return e0 - u * std::sin(om * t); };
        d.e0_dot_of_t = [=](double t) { return -u * om * std::cos(om * t); };
    } else {
        d.e0_of_t = [=](double) { return e0; };
        d.e0_dot_of_t = [](double) { return 0.0; };
    }
    if (params.barrier_drive) {
        const double a = params.barrier_drive->alpha;
        const double om = params.barrier_drive->omega;
        d.w_of_t = [=](double t) { return 1.0 + a * std::sin(om * t); };
        d.w_dot_of_t = [=](double t) { return a * om * std::cos(om * t); };
    } else {
        d.w_of_t = [](double) { return 1.0; };
        d.w_dot_of_t = [](double) { return 0.0; };
    }
    if (params.level_drive && params.barrier_drive)
        d.kind = Kind::combined;
    else if (params.level_drive)
        d.kind = Kind::level;
    else if (params.barrier_drive)
        d.kind = Kind::barrier;
    else
        d.kind = Kind::constant;
    return d;
}

void validate(const SpectralDensity& sd) {
    std::visit(overloaded{
                   [](const WideBand&) {},
                   [](const Lorentzian& l) { require(l.lambda > 0.0, "Lorentzian lambda must be > 0"); },
                   [](const Semicircle& s) { require(s.w_band > 0.0, "semicircle W must be > 0"); },
                   [](const FiniteChain& c) {
                       require(c.n_levels >= 1, "chain N must be >= 1");
                       require(c.w_band > 0.0, "chain W must be > 0");
                   },
               },
               sd);
}

std::string describe(const SpectralDensity& sd) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const WideBand&) { os << "wideband"; },
                   [&](const Lorentzian& l) { os << "lorentzian(lambda=" << l.lambda << ")"; },
                   [&](const Semicircle& s) { os << "semicircle(W=" << s.w_band << ")"; },
                   [&](const FiniteChain& c) { os << "chain(N=" << c.n_levels << ",W=" << c.w_band << ")"; },
               },
               sd);
    return os.str();
}

double support_half_width(const SpectralDensity& sd) {
    return std::visit(overloaded{
                          [](const WideBand&) { return std::numeric_limits<double>::infinity(); },
                          [](const Lorentzian&) { return std::numeric_limits<double>::infinity(); },
                          [](const Semicircle& s) { return s.w_band; },
                          [](const FiniteChain& c) { return c.w_band; },
                      },
                      sd);
}

double spectral_density_at(const SpectralDensity& sd, double e, double gamma) {
    const double base = gamma / (2.0 * pi);
    const auto semicircle = [&](double w) {
        const double x = e / w;
        return std::abs(x) >= 1.0 ? 0.0 : base * std::sqrt(1.0 - x * x);
    };
    return std::visit(overloaded{
                          [&](const WideBand&) { return base; },
                          [&](const Lorentzian& l) { return base * l.lambda * l.lambda / (e * e + l.lambda * l.lambda); },
                          [&](const Semicircle& s) { return semicircle(s.w_band); },
                          [&](const FiniteChain& c) { return semicircle(c.w_band); },
                      },
                      sd);
}

Complex memory_kernel(const SpectralDensity& sd, double tau, double gamma) {
    return std::visit(
        overloaded{
            [](const WideBand&) -> Complex {
                throw ConfigurationError("memory_kernel: wide-band kernel is a delta function");
            },
            [](const FiniteChain&) -> Complex {
                throw ConfigurationError("memory_kernel: finite chains are evolved exactly");
            },
            [&](const Lorentzian& l) -> Complex {
                return 0.5 * gamma * l.lambda * std::exp(-l.lambda * std::abs(tau));
            },
            [&](const Semicircle& s) -> Complex {
                // gamma J_1(W tau) / (2 tau), continuous at 0 with value gamma W / 4.
                const double x = s.w_band * std::abs(tau);
                if (x < 1e-6) return 0.25 * gamma * s.w_band * (1.0 - x * x / 8.0);
                return 0.5 * gamma * s.w_band * specfun::bessel_j(1, x) / x;
            },
        },
        sd);
}

std::vector<double> chain_levels(int n_levels, double w_band) {
    require(n_levels >= 1 && w_band > 0.0, "chain_levels: need N >= 1 and W > 0");
    std::vector<double> e(static_cast<std::size_t>(n_levels));
    for (int r = 1; r <= n_levels; ++r) e[static_cast<std::size_t>(r - 1)] = w_band * std::cos(r * pi / (n_levels + 1));
    return e;
}

std::vector<double> chain_couplings(int n_levels, double w_band, double gamma) {
    const std::vector<double> e = chain_levels(n_levels, w_band);
    const double scale = std::sqrt(gamma * w_band / (2.0 * (n_levels + 1)));
    std::vector<double> om(e.size());
    for (std::size_t r = 0; r < e.size(); ++r) {
        const double x = e[r] / w_band;
        om[r] = scale * std::sqrt(std::max(0.0, 1.0 - x * x));
    }
    return om;
}

double broadened_chain_density(const FiniteChain& chain, double e, double sigma, double gamma) {
    require(sigma > 0.0, "broadened_chain_density: sigma must be > 0");
    const std::vector<double> levels = chain_levels(chain.n_levels, chain.w_band);
    const std::vector<double> om = chain_couplings(chain.n_levels, chain.w_band, gamma);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * pi));
    double sum = 0.0;
    for (std::size_t r = 0; r < levels.size(); ++r) {
        const double d = (e - levels[r]) / sigma;
        sum += om[r] * om[r] * norm * std::exp(-0.5 * d * d);
    }
    return sum;
}

}  // namespace decaysim
