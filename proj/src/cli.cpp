#include "decaysim/cli.hpp"

#include "decaysim/chain.hpp"
#include "decaysim/closedform.hpp"
#include "decaysim/core.hpp"
#include "decaysim/spectra.hpp"
#include "decaysim/timesolver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#ifndef DECAYSIM_VERSION
#define DECAYSIM_VERSION "unknown"
#endif

namespace decaysim::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double safety_step = 0.025;  // half the resolution limit

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

json params_json(const SystemParams& p) {
    json j{{"e0", p.e0}, {"gamma", p.gamma}};
    if (p.level_drive) j["level_drive"] = {{"u", p.level_drive->u}, {"omega", p.level_drive->omega}};
    if (p.barrier_drive) j["barrier_drive"] = {{"alpha", p.barrier_drive->alpha}, {"omega", p.barrier_drive->omega}};
    return j;
}

Check make_check(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

double chain_step(double w_band, const SystemParams& p) {
    const double u = p.level_drive ? std::abs(p.level_drive->u) : 0.0;
    return safety_step / (w_band + std::abs(p.e0) + u);
}

// Common step satisfying the resolution rule for every parameter set.
double common_step(const std::vector<SystemParams>& runs, const SpectralDensity& sd) {
    double dt = std::numeric_limits<double>::infinity();
    for (const auto& p : runs) dt = std::min(dt, auto_step(p, sd));
    return dt;
}

std::vector<double> survival_column(const AmplitudeTrajectory& tr) { return tr.survival(); }

// ---------------------------------------------------------------------------
// Figure presets
// ---------------------------------------------------------------------------

FigureResult figure2() {
    FigureResult r;
    r.id = "fig2";
    const double w_band = 6.0;
    const SystemParams p{1.0, 1.0, std::nullopt, std::nullopt};
    const double t_max = 100.0;
    const double dt = chain_step(w_band, p);
    r.parameters = {{"system", params_json(p)}, {"w_band", w_band}, {"n_levels", {150, 250}}, {"t_max", t_max},
                    {"revival_thresholds", {{"fall", revival_fall}, {"rise", revival_rise}}}};
    r.solver = {{"method", "chain_eigendecomposition"}, {"dt", dt}};

    const DriveProfile drive = DriveProfile::from(p);
    std::map<int, ChainSeries> runs;
    for (int n : {150, 250}) runs[n] = evolve_chain(ChainModel::build({n, w_band}, p), drive, t_max, dt);

    const auto& t = runs[250].times;
    std::vector<double> markov(t.size());
    std::transform(t.begin(), t.end(), markov.begin(), [](double x) { return std::exp(-x); });
    r.table.header = {"t_in_1/Gamma", "P0_markovian", "P0_chain_N150", "P0_chain_N250"};
    r.table.columns = {t, markov, runs[150].survival(), runs[250].survival()};

    double dev = 0.0;
    const auto p250 = runs[250].survival();
    for (std::size_t k = 0; k < t.size() && t[k] <= 5.0; ++k) dev = std::max(dev, std::abs(p250[k] - markov[k]));
    r.checks.push_back(make_check("N=250 follows exp(-Gamma t) within 0.05 for Gamma t <= 5", dev < 0.05,
                                  "max |P0 - exp(-t)| = " + fmt(dev)));

    const auto rev150 = revival_time(runs[150]);
    const auto rev250 = revival_time(runs[250]);
    r.checks.push_back(make_check("N=150 revives", rev150.has_value(), rev150 ? "t_rev = " + fmt(*rev150) : "none"));
    r.checks.push_back(make_check("N=250 revives", rev250.has_value(), rev250 ? "t_rev = " + fmt(*rev250) : "none"));
    r.checks.push_back(make_check("revival time grows with N", rev150 && rev250 && *rev250 > *rev150,
                                  rev150 && rev250 ? fmt(*rev250) + " > " + fmt(*rev150) : "missing revival"));
    r.norm_checks = {{"max_norm_drift_N150", runs[150].max_norm_drift()},
                     {"max_norm_drift_N250", runs[250].max_norm_drift()},
                     {"t_rev_N150", rev150 ? json(*rev150) : json(nullptr)},
                     {"t_rev_N250", rev250 ? json(*rev250) : json(nullptr)}};
    return r;
}

// Figures 3 and 4: static versus driven Lorentzian runs for E0 = 3 and E0 = 0.
FigureResult driven_pair_figure(const std::string& id, bool level) {
    FigureResult r;
    r.id = id;
    const double lambda = 4.0;
    const double t_max = 6.0;
    const double t_probe = 4.0;
    const SpectralDensity sd = Lorentzian{lambda};

    std::vector<SystemParams> runs;
    for (double e0 : {3.0, 0.0}) {
        SystemParams stat{e0, 1.0, std::nullopt, std::nullopt};
        SystemParams drv = stat;
        if (level)
            drv.level_drive = LevelDrive{3.0, 2.0};
        else
            drv.barrier_drive = BarrierDrive{0.1, 2.0};
        runs.push_back(stat);
        runs.push_back(drv);
    }
    const double dt = common_step(runs, sd);
    const SolverConfig cfg{dt, t_max, Method::lorentzian_ode, 1e-8};
    r.parameters = {{"lambda", lambda}, {"t_max", t_max}, {"runs", json::array()}};
    for (const auto& p : runs) r.parameters["runs"].push_back(params_json(p));
    r.solver = {{"method", to_string(cfg.method)}, {"dt", dt}};

    r.table.header = {"t_in_1/Gamma", "P0_E0_3_static", "P0_E0_3_driven", "P0_E0_0_static", "P0_E0_0_driven"};
    std::vector<AmplitudeTrajectory> trajs;
    for (const auto& p : runs) trajs.push_back(solve(p, sd, DriveProfile::from(p), cfg));
    r.table.columns.push_back(trajs.front().times);
    double max_abs = 0.0;
    for (const auto& tr : trajs) {
        r.table.columns.push_back(survival_column(tr));
        max_abs = std::max(max_abs, tr.max_abs());
    }
    r.norm_checks = {{"max_abs_b0", max_abs}, {"bound_ok", max_abs <= 1.0 + 10.0 * cfg.tolerance}};

    const auto p_at = [&](std::size_t k) { return std::norm(trajs[k].at(t_probe)); };
    const double s3 = p_at(0), d3 = p_at(1), s0 = p_at(2), d0 = p_at(3);
    r.checks.push_back(make_check("E0=3: driven decays faster at Gamma t = 4", d3 < s3,
                                  "driven " + fmt(d3) + " vs static " + fmt(s3)));
    if (level)
        r.checks.push_back(make_check("E0=0: driven decays slower at Gamma t = 4", d0 > s0,
                                      "driven " + fmt(d0) + " vs static " + fmt(s0)));
    else
        r.checks.push_back(make_check("E0=0: driven decays faster at Gamma t = 4", d0 < s0,
                                      "driven " + fmt(d0) + " vs static " + fmt(s0)));
    return r;
}

FigureResult figure5() {
    FigureResult r;
    r.id = "fig5";
    const double a = 0.2;
    SystemParams lev{0.0, 1.0, LevelDrive{a, a}, std::nullopt};
    SystemParams bar{0.0, 1.0, std::nullopt, BarrierDrive{a, a}};
    r.parameters = {{"level", params_json(lev)}, {"barrier", params_json(bar)}};
    r.solver = {{"method", "floquet_asymptotic"}};

    const auto fl = closedform::FloquetSpectrum::level(lev);
    const auto fb = closedform::FloquetSpectrum::barrier(bar);
    std::vector<double> grid;
    const int points = 4001;
    for (int k = 0; k < points; ++k) grid.push_back(-2.0 + 4.0 * k / (points - 1));
    std::vector<double> vl(grid.size()), vb(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        vl[k] = fl(grid[k]);
        vb[k] = fb(grid[k]);
    }
    r.table.header = {"E_in_Gamma", "Pbar_level", "Pbar_barrier"};
    r.table.columns = {grid, vl, vb};

    const double nl = closedform::integrate_spectrum(fl, fl.sublevels(1e-3), 1.0);
    const double nb = closedform::integrate_spectrum(fb, fb.sublevels(1e-3), 1.0);
    r.norm_checks = {{"norm_level", nl}, {"norm_barrier", nb}};

    for (double e : {-a, a}) {
        r.checks.push_back(make_check("side peak E = " + fmt(e) + ": barrier above level", fb(e) > fl(e),
                                      "barrier " + fmt(fb(e)) + " vs level " + fmt(fl(e))));
    }
    // Central peak: the local maximum closest to E0.
    const auto central = [&](const std::vector<double>& v) {
        EnergySpectrum s;
        s.energies = grid;
        s.values = v;
        const auto pk = spectrum_peaks(s, 0.0);
        if (pk.empty()) throw NumericalError("fig5: spectrum without a maximum");
        return *std::min_element(pk.begin(), pk.end(),
                                 [&](std::size_t i, std::size_t j) { return std::abs(grid[i]) < std::abs(grid[j]); });
    };
    const std::size_t il = central(vl);
    const std::size_t ib = central(vb);
    const double rel = std::abs(vb[ib] - vl[il]) / vl[il];
    r.checks.push_back(make_check("central peaks agree within 5%", rel <= 0.05,
                                  "level " + fmt(vl[il]) + " at E = " + fmt(grid[il]) + ", barrier " + fmt(vb[ib]) +
                                      " at E = " + fmt(grid[ib]) + ", rel diff " + fmt(rel) + "; at E0 the values are " +
                                      fmt(fl(0.0)) + " and " + fmt(fb(0.0))));
    return r;
}

// ---------------------------------------------------------------------------
// Subcommand plumbing
// ---------------------------------------------------------------------------

struct Physics {
    std::string model{"wideband"};
    double lambda{4.0};
    double w_band{6.0};
    int n_levels{250};
    double e0{0.0};
    std::string drive{"none"};
    double u{0.0};
    double alpha{0.0};
    double omega{1.0};

    SystemParams params() const {
        SystemParams p;
        p.e0 = e0;
        if (drive == "level") p.level_drive = LevelDrive{u, omega};
        if (drive == "barrier") p.barrier_drive = BarrierDrive{alpha, omega};
        p.validate();
        return p;
    }

    SpectralDensity sd() const {
        if (model == "wideband") return WideBand{};
        if (model == "lorentzian") return Lorentzian{lambda};
        if (model == "semicircle") return Semicircle{w_band};
        return FiniteChain{n_levels, w_band};
    }
};

void add_physics(CLI::App* app, Physics& ph, bool with_model) {
    if (with_model) {
        app->add_option("--model", ph.model, "Reservoir model")
            ->check(CLI::IsMember({"wideband", "lorentzian", "semicircle", "chain"}))
            ->capture_default_str();
        app->add_option("--lambda", ph.lambda, "Lorentzian width (units of Gamma)")->capture_default_str();
        app->add_option("--w", ph.w_band, "Band half-width W (units of Gamma)")->capture_default_str();
        app->add_option("--n", ph.n_levels, "Chain length N")->capture_default_str();
    }
    app->add_option("--e0", ph.e0, "Well level E0 (units of Gamma)")->capture_default_str();
    app->add_option("--drive", ph.drive, "Periodic drive")
        ->check(CLI::IsMember({"none", "level", "barrier"}))
        ->capture_default_str();
    app->add_option("--u", ph.u, "Level drive amplitude")->capture_default_str();
    app->add_option("--alpha", ph.alpha, "Barrier drive amplitude")->capture_default_str();
    app->add_option("--omega", ph.omega, "Drive frequency")->capture_default_str();
}

struct RunContext {
    std::string command;
    fs::path out_dir{"."};
    std::chrono::steady_clock::time_point start{std::chrono::steady_clock::now()};

    json manifest(const json& parameters, const json& solver, const json& norm_checks, const std::vector<Check>& checks,
                  const std::vector<std::string>& outputs) const {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return {{"command", command},         {"parameters", parameters},
                {"solver", solver},           {"norm_checks", norm_checks},
                {"qualitative_checks", to_json(checks)}, {"version", DECAYSIM_VERSION},
                {"wall_time_s", wall},        {"outputs", outputs}};
    }
};

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
    for (const auto& c : checks) out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
}

Method parse_method(const std::string& m) {
    if (m == "volterra") return Method::volterra_pc;
    if (m == "ode") return Method::lorentzian_ode;
    if (m == "wideband") return Method::wideband;
    throw ConfigurationError("unknown method '" + m + "'");
}

int run_survival(const Physics& ph, double t_min, double t_max, double dt, std::vector<std::string> methods,
                 bool oracle, RunContext& ctx, std::ostream& out) {
    const SystemParams p = ph.params();
    const SpectralDensity sd = ph.sd();
    const DriveProfile drive = DriveProfile::from(p);
    if (t_min > 0.0 || t_max < 0.0 || t_min >= t_max) throw ConfigurationError("need t_min <= 0 <= t_max and t_min < t_max");

    json parameters = {{"system", params_json(p)}, {"reservoir", describe(sd)}, {"t_min", t_min}, {"t_max", t_max}};
    json solver, norm_checks;
    std::vector<Check> checks;
    Table table;

    if (ph.model == "chain") {
        if (t_min < 0.0) throw ConfigurationError("chain runs start at t = 0");
        if (oracle) throw ConfigurationError("no closed-form oracle for chain runs");
        if (dt <= 0.0) dt = chain_step(ph.w_band, p);
        const ChainModel model = ChainModel::build(std::get<FiniteChain>(sd), p);
        const ChainSeries series = evolve_chain(model, drive, t_max, dt);
        table.header = {"t_in_1/Gamma", "P0_chain"};
        table.columns = {series.times, series.survival()};
        std::optional<double> rev;
        try {
            rev = revival_time(series);
        } catch (const ConfigurationError&) {
        }
        solver = {{"method", p.is_static() ? "chain_eigendecomposition" : "chain_splitting"}, {"dt", dt}};
        norm_checks = {{"max_norm_drift", series.max_norm_drift()}, {"t_rev", rev ? json(*rev) : json(nullptr)}};
        out << "t_rev = " << (rev ? fmt(*rev) : std::string("none")) << "\n";
    } else {
        if (methods.empty()) methods.push_back(ph.model == "wideband" ? "wideband" : "volterra");
        if (dt <= 0.0) dt = auto_step(p, sd);
        table.header = {"t_in_1/Gamma"};
        solver = {{"dt", dt}, {"methods", methods}};
        std::vector<double> times;
        std::vector<Complex> first;
        for (const auto& m : methods) {
            const Method method = parse_method(m);
            if (method == Method::wideband && ph.model != "wideband")
                throw ConfigurationError("method wideband requires --model wideband");
            if (method != Method::wideband && ph.model == "wideband")
                throw ConfigurationError("--model wideband uses method wideband");
            const SolverConfig cfg{dt, t_max, method, 1e-8};
            const AmplitudeTrajectory tr = solve_two_sided(p, sd, drive, cfg, t_min, t_max);
            if (times.empty()) {
                times = tr.times;
                table.columns.push_back(times);
            } else if (tr.times.size() != times.size()) {
                throw ConfigurationError("methods produced different grids");
            }
            table.header.push_back("P0_" + m);
            table.columns.push_back(tr.survival());
            norm_checks["max_abs_b0_" + m] = tr.max_abs();
            if (p.is_static() && t_min < 0.0) norm_checks["time_reversal_defect_" + m] = time_reversal_defect(tr);
        }
        if (oracle) {
            std::vector<double> col(times.size());
            if (ph.model == "wideband") {
                for (std::size_t k = 0; k < times.size(); ++k)
                    col[k] = std::norm(closedform::b0_markovian_driven(p, times[k]));
            } else if (ph.model == "lorentzian" && p.is_static()) {
                for (std::size_t k = 0; k < times.size(); ++k)
                    col[k] = std::norm(closedform::b0_lorentzian_static(p, ph.lambda, times[k]));
            } else {
                throw ConfigurationError("closed-form oracle exists only for wideband and static Lorentzian runs");
            }
            table.header.push_back("P0_closed_form");
            table.columns.push_back(col);
        }
        if (p.is_static()) {
            const auto& t = table.columns[0];
            const auto& p0 = table.columns[1];
            bool mono = true;
            for (std::size_t k = 1; k < t.size(); ++k)
                if (t[k - 1] >= 0.0 && p0[k] >= p0[k - 1]) mono = false;
            checks.push_back(make_check("P0 decreasing for t > 0", mono, table.header[1]));
        }
    }

    fs::create_directories(ctx.out_dir);
    const fs::path file = ctx.out_dir / "survival.csv";
    write_csv(file, table);
    append_manifest(ctx.out_dir, ctx.manifest(parameters, solver, norm_checks, checks, {file.string()}));
    out << "wrote " << file.string() << " (" << table.rows() << " rows)\n";
    return exit_ok;
}

int run_spectrum(const Physics& ph, const std::string& method, double t, int points, const std::string& phase,
                 RunContext& ctx, std::ostream& out) {
    const SystemParams p = ph.params();
    const std::vector<double> grid = default_energy_grid(p, points);
    const DriveKind kind = ph.drive == "level" ? DriveKind::level : ph.drive == "barrier" ? DriveKind::barrier : DriveKind::none;
    json parameters = {{"system", params_json(p)}, {"reservoir", "wideband"}, {"grid_points", grid.size()}};
    json solver = {{"method", method}};
    json norm_checks;
    const auto bp = phase == "linear" ? closedform::BarrierPhase::linear : closedform::BarrierPhase::exact;
    solver["barrier_phase"] = phase;
    EnergySpectrum s;
    if (method == "asymptotic") {
        s = spectrum_asymptotic(p, kind, grid, bp);
    } else {
        if (!(t >= 0.0)) throw ConfigurationError("--t must be >= 0");
        const double e_abs = std::max(std::abs(grid.front()), std::abs(grid.back()));
        const double dt = std::min(auto_step(p, WideBand{}), 0.1 / e_abs);
        const DriveProfile drive = DriveProfile::from(p);
        const AmplitudeTrajectory tr = solve_wideband(p, drive, SolverConfig{dt, t, Method::wideband, 1e-8}, bp);
        s = spectrum_from_trajectory(tr, drive, WideBand{}, grid);
        const double p0 = tr.survival(tr.size() - 1);
        solver["dt"] = dt;
        solver["t"] = t;
        norm_checks["P0_t"] = p0;
        norm_checks["P0_plus_spectrum"] = p0 + s.total();
    }
    norm_checks["norm_on_grid"] = s.norm;
    norm_checks["tail_estimate"] = s.tail;
    norm_checks["norm_total"] = s.total();

    Table table{{"E_in_Gamma", "Pbar"}, {s.energies, s.values}};
    fs::create_directories(ctx.out_dir);
    const fs::path file = ctx.out_dir / "spectrum.csv";
    write_csv(file, table);
    append_manifest(ctx.out_dir, ctx.manifest(parameters, solver, norm_checks, {}, {file.string()}));
    out << "norm = " << fmt(s.total()) << "\nwrote " << file.string() << " (" << table.rows() << " rows)\n";
    return exit_ok;
}

int run_revival(const Physics& ph, double t_max, double dt, RunContext& ctx, std::ostream& out) {
    Physics chain = ph;
    chain.model = "chain";
    const SystemParams p = chain.params();
    if (dt <= 0.0) dt = chain_step(ph.w_band, p);
    const ChainModel model = ChainModel::build({ph.n_levels, ph.w_band}, p);
    const ChainSeries series = evolve_chain(model, DriveProfile::from(p), t_max, dt);
    const auto rev = revival_time(series);
    Table table{{"t_in_1/Gamma", "P0_chain"}, {series.times, series.survival()}};
    fs::create_directories(ctx.out_dir);
    const fs::path file = ctx.out_dir / "revival.csv";
    write_csv(file, table);
    const json parameters = {{"system", params_json(p)}, {"reservoir", describe(chain.sd())}, {"t_max", t_max},
                             {"revival_thresholds", {{"fall", revival_fall}, {"rise", revival_rise}}}};
    const json norm_checks = {{"max_norm_drift", series.max_norm_drift()}, {"t_rev", rev ? json(*rev) : json(nullptr)}};
    append_manifest(ctx.out_dir, ctx.manifest(parameters, {{"method", "chain"}, {"dt", dt}}, norm_checks, {}, {file.string()}));
    out << "t_rev = " << (rev ? fmt(*rev) : std::string("none")) << "\n";
    return exit_ok;
}

int run_reproduce(const std::string& id, RunContext& ctx, std::ostream& out) {
    const FigureResult r = reproduce_figure(id);
    fs::create_directories(ctx.out_dir);
    const fs::path file = ctx.out_dir / (id + ".csv");
    write_csv(file, r.table);
    append_manifest(ctx.out_dir, ctx.manifest(r.parameters, r.solver, r.norm_checks, r.checks, {file.string()}));
    print_checks(out, r.checks);
    out << "wrote " << file.string() << " (" << r.table.rows() << " rows)\n";
    return r.passed() ? exit_ok : exit_qualitative;
}

int run_selftest(RunContext& ctx, std::ostream& out) {
    std::vector<Check> checks;
    const double lambda = 4.0;
    for (double e0 : {0.0, 1.0, 3.0}) {
        const SystemParams p{e0, 1.0, std::nullopt, std::nullopt};
        const DriveProfile d = DriveProfile::from(p);
        const SolverConfig cfg{2.5e-3, 6.0, Method::volterra_pc, 1e-8};
        const auto vol = solve_two_sided(p, Lorentzian{lambda}, d, cfg, -6.0, 6.0);
        SolverConfig ode_cfg = cfg;
        ode_cfg.method = Method::lorentzian_ode;
        const auto ode = solve_two_sided(p, Lorentzian{lambda}, d, ode_cfg, -6.0, 6.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < vol.size(); ++k) {
            const double pc = std::norm(closedform::b0_lorentzian_static(p, lambda, vol.times[k]));
            worst = std::max({worst, std::abs(vol.survival(k) - pc), std::abs(ode.survival(k) - pc),
                              std::abs(vol.survival(k) - ode.survival(k))});
        }
        checks.push_back(make_check("Lorentzian closed form, Volterra and ODE agree, E0 = " + fmt(e0), worst < 1e-5,
                                    "max |dP0| = " + fmt(worst)));
        const double tr = std::max(time_reversal_defect(vol), time_reversal_defect(ode));
        checks.push_back(make_check("time reversal, E0 = " + fmt(e0), tr < 1e-7, "defect " + fmt(tr)));
    }
    {
        const SystemParams p{0.0, 1.0, std::nullopt, std::nullopt};
        const auto tr = solve_two_sided(p, WideBand{}, DriveProfile::from(p), {1e-2, 5.0, Method::wideband, 1e-8}, -5.0, 5.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) worst = std::max(worst, std::abs(tr.survival(k) - std::exp(-std::abs(tr.times[k]))));
        checks.push_back(make_check("wide-band P0 = exp(-|t|)", worst < 1e-12, "max dev " + fmt(worst)));
    }
    {
        const SystemParams lev{0.0, 1.0, LevelDrive{3.0, 2.0}, std::nullopt};
        const SystemParams bar{0.0, 1.0, std::nullopt, BarrierDrive{0.1, 2.0}};
        const auto fl = closedform::FloquetSpectrum::level(lev);
        const auto fb = closedform::FloquetSpectrum::barrier(bar, 1e-10, closedform::BarrierPhase::exact);
        const auto fb1 = closedform::FloquetSpectrum::barrier(bar);
        const double nl = closedform::integrate_spectrum(fl, fl.sublevels(1e-3), 1.0);
        const double nb = closedform::integrate_spectrum(fb, fb.sublevels(1e-3), 1.0);
        const double nb1 = closedform::integrate_spectrum(fb1, fb1.sublevels(1e-3), 1.0);
        checks.push_back(make_check("level Floquet spectrum normalized", std::abs(nl - 1.0) < 1e-3, fmt(nl)));
        checks.push_back(make_check("barrier Floquet spectrum normalized (exact width)", std::abs(nb - 1.0) < 1e-3, fmt(nb)));
        // The first order form only conserves probability up to O(alpha^2).
        const double a2 = bar.barrier_drive->alpha * bar.barrier_drive->alpha;
        checks.push_back(make_check("first order barrier spectrum norm within alpha^2 of 1", std::abs(nb1 - 1.0) < a2,
                                    fmt(nb1)));
    }
    print_checks(out, checks);
    const bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    fs::create_directories(ctx.out_dir);
    append_manifest(ctx.out_dir, ctx.manifest(json::object(), {{"method", "oracle_suite"}}, json::object(), checks, {}));
    return ok ? exit_ok : exit_qualitative;
}

}  // namespace

bool FigureResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

FigureResult reproduce_figure(const std::string& id) {
    if (id == "fig2") return figure2();
    if (id == "fig3") return driven_pair_figure("fig3", true);
    if (id == "fig4") return driven_pair_figure("fig4", false);
    if (id == "fig5") return figure5();
    throw ConfigurationError("unknown figure id '" + id + "' (expected fig2, fig3, fig4 or fig5)");
}

std::string format_csv(const Table& table) {
    if (table.header.size() != table.columns.size()) throw ConfigurationError("CSV header and columns disagree");
    for (const auto& c : table.columns)
        if (c.size() != table.rows()) throw ConfigurationError("CSV columns differ in length");
    std::string s;
    for (std::size_t j = 0; j < table.header.size(); ++j) s += (j ? "," : "") + table.header[j];
    s += '\n';
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (j) s += ',';
            s += fmt(table.columns[j][i]);
        }
        s += '\n';
    }
    return s;
}

void write_csv(const fs::path& file, const Table& table) {
    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + file.string());
    f << format_csv(table);
}

json to_json(const std::vector<Check>& checks) {
    json a = json::array();
    for (const auto& c : checks) a.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return a;
}

void append_manifest(const fs::path& dir, const json& entry) {
    std::ofstream f(dir / "manifest.jsonl", std::ios::app);
    if (!f) throw std::runtime_error("cannot open manifest in " + dir.string());
    f << entry.dump() << '\n';
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"decaysim: quantum decay of a localized level into a continuum (units of Gamma)"};
    app.set_version_flag("--version", std::string(DECAYSIM_VERSION));
    app.require_subcommand(1);
    std::string out_dir = ".";
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();

    Physics surv_ph;
    double t_min = 0.0, t_max = 6.0, dt = 0.0;
    std::vector<std::string> methods;
    bool oracle = false;
    auto* surv = app.add_subcommand("survival", "Survival probability P0(t)");
    add_physics(surv, surv_ph, true);
    surv->add_option("--t-min", t_min, "Start of the time range (<= 0)")->capture_default_str();
    surv->add_option("--t-max", t_max, "End of the time range (>= 0)")->capture_default_str();
    surv->add_option("--dt", dt, "Time step (default: resolution rule with 2x margin)");
    surv->add_option("--method", methods, "volterra, ode or wideband; comma separated for side-by-side columns")
        ->delimiter(',');
    surv->add_flag("--oracle", oracle, "Add the closed-form column");

    Physics spec_ph;
    std::string spec_method = "asymptotic", phase = "linear";
    double spec_t = 12.0;
    int points = 4001;
    auto* spec = app.add_subcommand("spectrum", "Energy spectrum of the tunneled particle (wide band)");
    add_physics(spec, spec_ph, false);
    spec->add_option("--method", spec_method, "asymptotic or trajectory")
        ->check(CLI::IsMember({"asymptotic", "trajectory"}))
        ->capture_default_str();
    spec->add_option("--t", spec_t, "Time for the trajectory spectrum")->capture_default_str();
    spec->add_option("--points", points, "Base grid points")->capture_default_str();
    spec->add_option("--barrier-phase", phase, "exact or linear width integral")
        ->check(CLI::IsMember({"exact", "linear"}))
        ->capture_default_str();

    Physics rev_ph;
    rev_ph.e0 = 1.0;
    double rev_t = 150.0, rev_dt = 0.0;
    auto* rev = app.add_subcommand("revival", "Revival time of a finite chain");
    rev->add_option("--n", rev_ph.n_levels, "Chain length N")->capture_default_str();
    rev->add_option("--w", rev_ph.w_band, "Band half-width W")->capture_default_str();
    rev->add_option("--e0", rev_ph.e0, "Well level E0")->capture_default_str();
    rev->add_option("--t-max", rev_t, "Evolution time")->capture_default_str();
    rev->add_option("--dt", rev_dt, "Time step");

    std::string fig;
    auto* repro = app.add_subcommand("reproduce", "Regenerate a figure preset with its qualitative checks");
    repro->add_option("figure", fig, "fig2, fig3, fig4 or fig5")->required();

    auto* self = app.add_subcommand("selftest", "Oracle-equivalence suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << DECAYSIM_VERSION << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    RunContext ctx;
    ctx.out_dir = out_dir;
    std::ostringstream cmd;
    for (int i = 1; i < argc; ++i) cmd << (i > 1 ? " " : "") << argv[i];
    ctx.command = cmd.str();

    try {
        if (*surv) return run_survival(surv_ph, t_min, t_max, dt, methods, oracle, ctx, out);
        if (*spec) return run_spectrum(spec_ph, spec_method, spec_t, points, phase, ctx, out);
        if (*rev) return run_revival(rev_ph, rev_t, rev_dt, ctx, out);
        if (*repro) return run_reproduce(fig, ctx, out);
        if (*self) return run_selftest(ctx, out);
    } catch (const ConfigurationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_usage;
}

}  // namespace decaysim::cli
