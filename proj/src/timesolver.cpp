#include "decaysim/timesolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace decaysim {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr double divergence_bound = 2.0;
constexpr double resolution_limit = 0.05;

struct HalfGrid {
    std::size_t steps;
    double h;  // signed
};

HalfGrid half_grid(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigurationError("dt must be > 0");
    if (!std::isfinite(t_end)) throw ConfigurationError("t_end must be finite");
    if (t_end == 0.0) return {0, dt};
    const auto n = static_cast<std::size_t>(std::ceil(std::abs(t_end) / dt - 1e-9));
    return {std::max<std::size_t>(n, 1), t_end / static_cast<double>(std::max<std::size_t>(n, 1))};
}

// Nodes are produced outward from t = 0; store them ascending.
void orient(AmplitudeTrajectory& tr) {
    if (tr.times.size() > 1 && tr.times[1] < tr.times[0]) {
        std::reverse(tr.times.begin(), tr.times.end());
        std::reverse(tr.b0.begin(), tr.b0.end());
        std::reverse(tr.b0_dot.begin(), tr.b0_dot.end());
    }
}

void check_divergence(const Complex& b, double t) {
    if (!(std::abs(b) <= divergence_bound)) {
        std::ostringstream os;
        os << "solution diverged: |b0| = " << std::abs(b) << " at t = " << t;
        throw NumericalError(os.str());
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::volterra_pc: return "volterra";
        case Method::lorentzian_ode: return "lorentzian_ode";
        case Method::wideband: return "wideband";
    }
    return "?";
}

std::vector<double> AmplitudeTrajectory::survival() const {
    std::vector<double> p(b0.size());
    std::transform(b0.begin(), b0.end(), p.begin(), [](const Complex& b) { return std::norm(b); });
    return p;
}

double AmplitudeTrajectory::max_abs() const {
    double m = 0.0;
    for (const Complex& b : b0) m = std::max(m, std::abs(b));
    return m;
}

std::size_t AmplitudeTrajectory::origin() const {
    const auto it = std::find(times.begin(), times.end(), 0.0);
    if (it == times.end()) throw ConfigurationError("trajectory has no t = 0 node");
    return static_cast<std::size_t>(it - times.begin());
}

Complex AmplitudeTrajectory::at(double t) const {
    if (times.empty() || t < times.front() || t > times.back())
        throw ConfigurationError("AmplitudeTrajectory::at: time outside the grid");
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin());
    if (times[k] == t || k == 0) return b0[k];
    const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - s) * b0[k - 1] + s * b0[k];
}

MemoryKernel MemoryKernel::from(const SpectralDensity& sd, double gamma) {
    MemoryKernel k;
    k.value = [sd, gamma](double tau) { return memory_kernel(sd, tau, gamma); };
    if (const auto* l = std::get_if<Lorentzian>(&sd)) k.exponential_rate = l->lambda;
    k.value(0.0);  // rejects WideBand and FiniteChain up front
    return k;
}

double resolution_scale(const SystemParams& params, const SpectralDensity& sd) {
    double scale = params.gamma;
    std::visit(overloaded{
                   [](const WideBand&) {},
                   [&](const Lorentzian& l) { scale = std::max(scale, l.lambda); },
                   [&](const Semicircle& s) { scale = std::max(scale, s.w_band); },
                   [&](const FiniteChain& c) { scale = std::max(scale, c.w_band); },
               },
               sd);
    const double u = params.level_drive ? std::abs(params.level_drive->u) : 0.0;
    scale = std::max(scale, std::abs(params.e0) + u);
    if (params.level_drive) scale = std::max(scale, params.level_drive->omega);
    if (params.barrier_drive) scale = std::max(scale, params.barrier_drive->omega);
    return scale;
}

void check_resolution(const SystemParams& params, const SpectralDensity& sd, double dt) {
    const double product = dt * resolution_scale(params, sd);
    if (product > resolution_limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "resolution rule violated: dt * max(Gamma, Lambda|W, |E0|+u, omega) = " << product << " > "
           << resolution_limit;
        throw ConfigurationError(os.str());
    }
}

double auto_step(const SystemParams& params, const SpectralDensity& sd) {
    return 0.5 * resolution_limit / resolution_scale(params, sd);
}

// ---------------------------------------------------------------------------
// Volterra: i b' = E0(t) b - i w(t) \int_0^t K(t - s) w(s) b(s) ds
//
// With g = w b and I_n the trapezoidal sum of K(t_n - t_j) g_j, the step
// b_{n+1} = b_n + h/2 (f_n + f_{n+1}),  f = -i E0 b - w I,
// is linear in b_{n+1} and solved exactly.
// ---------------------------------------------------------------------------
AmplitudeTrajectory solve_volterra(const SystemParams& params, const MemoryKernel& kernel, const DriveProfile& drive,
                                   const SolverConfig& cfg) {
    const HalfGrid grid = half_grid(cfg.t_end, cfg.dt);
    const std::size_t n_steps = grid.steps;
    const double h = grid.h;

    AmplitudeTrajectory tr;
    tr.provenance = {cfg, params, WideBand{}};
    tr.times.resize(n_steps + 1);
    tr.b0.resize(n_steps + 1);
    tr.b0_dot.resize(n_steps + 1);

    std::vector<double> e0(n_steps + 1), w(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * h;
        tr.times[k] = t;
        e0[k] = drive.e0_of_t(t);
        w[k] = drive.w_of_t(t);
    }

    const Complex k0 = kernel.value(0.0);
    const bool recursive = kernel.exponential_rate.has_value();
    std::vector<Complex> kv;
    Complex decay{0.0, 0.0};
    if (recursive) {
        decay = std::exp(-*kernel.exponential_rate * std::abs(h));
    } else {
        kv.resize(n_steps + 1);
        for (std::size_t k = 0; k <= n_steps; ++k) kv[k] = kernel.value(static_cast<double>(k) * h);
    }

    std::vector<Complex> g(n_steps + 1);
    Complex y{1.0, 0.0};
    tr.b0[0] = y;
    g[0] = w[0] * y;
    Complex f = -I * e0[0] * y;  // memory integral vanishes at t = 0
    tr.b0_dot[0] = f;

    // Recursive history: A_{n+1} = d (A_n + g_n), A_0 = -g_0 / 2.
    Complex acc = -0.5 * g[0];

    for (std::size_t n = 0; n < n_steps; ++n) {
        const std::size_t m = n + 1;
        Complex hist{0.0, 0.0};
        if (recursive) {
            acc = decay * (acc + g[n]);
            hist = h * k0 * acc;
        } else {
            Complex s = 0.5 * kv[m] * g[0];
            for (std::size_t j = 1; j <= n; ++j) s += kv[m - j] * g[j];
            hist = h * s;
        }
        const Complex lhs = 1.0 + 0.5 * h * (I * e0[m] + 0.5 * h * k0 * w[m] * w[m]);
        const Complex rhs = y + 0.5 * h * f - 0.5 * h * w[m] * hist;
        y = rhs / lhs;
        check_divergence(y, tr.times[m]);
        g[m] = w[m] * y;
        f = -I * e0[m] * y - w[m] * (hist + 0.5 * h * k0 * g[m]);
        tr.b0[m] = y;
        tr.b0_dot[m] = f;
    }
    orient(tr);
    return tr;
}

AmplitudeTrajectory solve_volterra(const SystemParams& params, const SpectralDensity& sd, const DriveProfile& drive,
                                   const SolverConfig& cfg) {
    params.validate();
    validate(sd);
    if (!std::holds_alternative<Lorentzian>(sd) && !std::holds_alternative<Semicircle>(sd))
        throw ConfigurationError("solve_volterra: reservoir must be Lorentzian or Semicircle");
    const HalfGrid grid = half_grid(cfg.t_end, cfg.dt);
    check_resolution(params, sd, std::abs(grid.h));
    AmplitudeTrajectory tr = solve_volterra(params, MemoryKernel::from(sd, params.gamma), drive, cfg);
    tr.provenance = {cfg, params, sd};
    tr.provenance.cfg.method = Method::volterra_pc;
    return tr;
}

// ---------------------------------------------------------------------------
// Lorentzian reservoir as a second order equation (s = sgn(t) on each side):
// i b'' = [E0 - i s L + i w'/w] b' + [E0' + (s L - w'/w) E0 - i L G w^2 / 2] b
// ---------------------------------------------------------------------------
AmplitudeTrajectory solve_lorentzian_ode(const SystemParams& params, double lambda, const DriveProfile& drive,
                                         const SolverConfig& cfg) {
    params.validate();
    const SpectralDensity sd = Lorentzian{lambda};
    validate(sd);
    const HalfGrid grid = half_grid(cfg.t_end, cfg.dt);
    check_resolution(params, sd, std::abs(grid.h));
    const double h = grid.h;
    const double side = h > 0.0 ? 1.0 : -1.0;
    const double gamma = params.gamma;

    const auto rhs = [&](double t, const Complex& b, const Complex& v, Complex& db, Complex& dv) {
        const double w = drive.w_of_t(t);
        if (!(w > 0.0)) {
            std::ostringstream os;
            os << "barrier factor w(t) reached " << w << " at t = " << t;
            throw NumericalError(os.str());
        }
        const double wr = drive.w_dot_of_t(t) / w;
        const double e0 = drive.e0_of_t(t);
        const Complex cv = Complex{e0, -side * lambda + wr};
        const Complex cb = Complex{drive.e0_dot_of_t(t) + (side * lambda - wr) * e0, -0.5 * lambda * gamma * w * w};
        db = v;
        dv = -I * (cv * v + cb * b);
    };

    AmplitudeTrajectory tr;
    tr.provenance = {cfg, params, sd};
    tr.provenance.cfg.method = Method::lorentzian_ode;
    tr.times.resize(grid.steps + 1);
    tr.b0.resize(grid.steps + 1);
    tr.b0_dot.resize(grid.steps + 1);

    Complex b{1.0, 0.0};
    Complex v = -I * drive.e0_of_t(0.0);
    tr.times[0] = 0.0;
    tr.b0[0] = b;
    tr.b0_dot[0] = v;
    for (std::size_t n = 0; n < grid.steps; ++n) {
        const double t = static_cast<double>(n) * h;
        Complex k1b, k1v, k2b, k2v, k3b, k3v, k4b, k4v;
        rhs(t, b, v, k1b, k1v);
        rhs(t + 0.5 * h, b + 0.5 * h * k1b, v + 0.5 * h * k1v, k2b, k2v);
        rhs(t + 0.5 * h, b + 0.5 * h * k2b, v + 0.5 * h * k2v, k3b, k3v);
        rhs(t + h, b + h * k3b, v + h * k3v, k4b, k4v);
        b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        const double tn = static_cast<double>(n + 1) * h;
        check_divergence(b, tn);
        tr.times[n + 1] = tn;
        tr.b0[n + 1] = b;
        tr.b0_dot[n + 1] = v;
    }
    orient(tr);
    return tr;
}

// ---------------------------------------------------------------------------
// Wide-band limit: b0 = exp(-i \int_0^t [E0(t') - i (G/2) w(t')^2 sgn(t)] dt').
// ---------------------------------------------------------------------------
AmplitudeTrajectory solve_wideband(const SystemParams& params, const DriveProfile& drive, const SolverConfig& cfg,
                                   closedform::BarrierPhase barrier) {
    params.validate();
    const HalfGrid grid = half_grid(cfg.t_end, cfg.dt);
    const double h = grid.h;
    const double side = h > 0.0 ? 1.0 : -1.0;
    const double gamma = params.gamma;

    AmplitudeTrajectory tr;
    tr.provenance = {cfg, params, WideBand{}};
    tr.provenance.cfg.method = Method::wideband;
    tr.times.resize(grid.steps + 1);
    tr.b0.resize(grid.steps + 1);
    tr.b0_dot.resize(grid.steps + 1);

    const bool closed = drive.kind == DriveProfile::Kind::constant || drive.kind == DriveProfile::Kind::level ||
                        drive.kind == DriveProfile::Kind::barrier;
    std::optional<closedform::WidebandPhase> phase;
    if (closed) phase.emplace(params, barrier);

    Complex acc{0.0, 0.0};  // running phase integral for custom drives
    const auto integrand = [&](double t) {
        const double w = drive.w_of_t(t);
        return Complex{drive.e0_of_t(t), -0.5 * gamma * side * w * w};
    };
    for (std::size_t k = 0; k <= grid.steps; ++k) {
        const double t = static_cast<double>(k) * h;
        if (!closed && k > 0) {
            const double ta = t - h;
            acc += h / 6.0 * (integrand(ta) + 4.0 * integrand(ta + 0.5 * h) + integrand(t));
        }
        const Complex ph = closed ? (*phase)(t) : acc;
        const Complex b = std::exp(-I * ph);
        const double w = drive.w_of_t(t);
        tr.times[k] = t;
        tr.b0[k] = b;
        tr.b0_dot[k] = (-I * drive.e0_of_t(t) - 0.5 * gamma * w * w * sgn(t)) * b;
    }
    orient(tr);
    return tr;
}

AmplitudeTrajectory solve(const SystemParams& params, const SpectralDensity& sd, const DriveProfile& drive,
                          const SolverConfig& cfg) {
    switch (cfg.method) {
        case Method::volterra_pc: return solve_volterra(params, sd, drive, cfg);
        case Method::lorentzian_ode: {
            const auto* l = std::get_if<Lorentzian>(&sd);
            if (!l) throw ConfigurationError("lorentzian_ode requires a Lorentzian reservoir");
            return solve_lorentzian_ode(params, l->lambda, drive, cfg);
        }
        case Method::wideband: return solve_wideband(params, drive, cfg);
    }
    throw ConfigurationError("unknown method");
}

AmplitudeTrajectory join(const AmplitudeTrajectory& negative, const AmplitudeTrajectory& positive) {
    if (negative.times.empty()) return positive;
    if (positive.times.empty()) return negative;
    if (negative.times.back() != 0.0 || positive.times.front() != 0.0)
        throw ConfigurationError("join: halves must meet at t = 0");
    AmplitudeTrajectory out = positive;
    out.times.assign(negative.times.begin(), negative.times.end() - 1);
    out.b0.assign(negative.b0.begin(), negative.b0.end() - 1);
    out.b0_dot.assign(negative.b0_dot.begin(), negative.b0_dot.end() - 1);
    out.times.insert(out.times.end(), positive.times.begin(), positive.times.end());
    out.b0.insert(out.b0.end(), positive.b0.begin(), positive.b0.end());
    out.b0_dot.insert(out.b0_dot.end(), positive.b0_dot.begin(), positive.b0_dot.end());
    return out;
}

AmplitudeTrajectory solve_two_sided(const SystemParams& params, const SpectralDensity& sd, const DriveProfile& drive,
                                    SolverConfig cfg, double t_min, double t_max) {
    if (t_min > 0.0 || t_max < 0.0) throw ConfigurationError("time range must contain t = 0");
    AmplitudeTrajectory neg, pos;
    if (t_min < 0.0) {
        cfg.t_end = t_min;
        neg = solve(params, sd, drive, cfg);
    }
    cfg.t_end = t_max;
    pos = solve(params, sd, drive, cfg);
    AmplitudeTrajectory out = join(neg, pos);
    return out;
}

namespace {

bool same_physics(const Provenance& a, const Provenance& b) {
    const auto drive_eq = [](const SystemParams& x, const SystemParams& y) {
        const bool lv = x.level_drive.has_value() == y.level_drive.has_value() &&
                        (!x.level_drive || (x.level_drive->u == y.level_drive->u &&
                                            x.level_drive->omega == y.level_drive->omega));
        const bool bv = x.barrier_drive.has_value() == y.barrier_drive.has_value() &&
                        (!x.barrier_drive || (x.barrier_drive->alpha == y.barrier_drive->alpha &&
                                              x.barrier_drive->omega == y.barrier_drive->omega));
        return lv && bv;
    };
    return a.params.e0 == b.params.e0 && a.params.gamma == b.params.gamma && drive_eq(a.params, b.params) &&
           describe(a.sd) == describe(b.sd) && a.cfg.method == b.cfg.method && a.cfg.t_end == b.cfg.t_end;
}

// max |a(t) - b(t)| over the nodes of `a` (b must be at least as fine).
double max_difference_on(const AmplitudeTrajectory& a, const AmplitudeTrajectory& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a.times[i];
        const auto it = std::lower_bound(b.times.begin(), b.times.end(), t - 1e-12 * (1.0 + std::abs(t)));
        if (it == b.times.end() || std::abs(*it - t) > 1e-9 * (1.0 + std::abs(t)))
            throw ConfigurationError("convergence_order: grids are not nested");
        m = std::max(m, std::abs(a.b0[i] - b.b0[static_cast<std::size_t>(it - b.times.begin())]));
    }
    return m;
}

void check_pair(const AmplitudeTrajectory& coarse, const AmplitudeTrajectory& fine) {
    if (!same_physics(coarse.provenance, fine.provenance))
        throw ConfigurationError("convergence_order: runs differ in physics or method");
    if (std::abs(coarse.provenance.cfg.dt - 2.0 * fine.provenance.cfg.dt) > 1e-12 * coarse.provenance.cfg.dt &&
        coarse.provenance.cfg.dt != fine.provenance.cfg.dt)
        throw ConfigurationError("convergence_order: steps must halve");
}

}  // namespace

double convergence_order(const AmplitudeTrajectory& coarse, const AmplitudeTrajectory& fine,
                         const AmplitudeTrajectory& finest) {
    check_pair(coarse, fine);
    check_pair(fine, finest);
    const double d1 = max_difference_on(coarse, fine);
    const double d2 = max_difference_on(fine, finest);
    if (d2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(d1 / d2);
}

double convergence_order(const AmplitudeTrajectory& coarse, const AmplitudeTrajectory& fine,
                         const std::function<Complex(double)>& exact) {
    check_pair(coarse, fine);
    const auto err = [&](const AmplitudeTrajectory& tr) {
        double m = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i) m = std::max(m, std::abs(tr.b0[i] - exact(tr.times[i])));
        return m;
    };
    const double e1 = err(coarse);
    const double e2 = err(fine);
    if (e2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(e1 / e2);
}

double time_reversal_defect(const AmplitudeTrajectory& traj) {
    const std::size_t o = traj.origin();
    const std::size_t n = std::min(o, traj.size() - 1 - o);
    double m = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double tp = traj.times[o + k];
        const double tn = traj.times[o - k];
        if (std::abs(tp + tn) > 1e-9 * (1.0 + tp)) throw ConfigurationError("time_reversal_defect: grid is not symmetric");
        m = std::max(m, std::abs(traj.b0[o - k] - std::conj(traj.b0[o + k])));
    }
    return m;
}

}  // namespace decaysim
