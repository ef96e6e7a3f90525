#include "decaysim/chain.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decaysim {

namespace {

constexpr Complex I{0.0, 1.0};

void check_norm(double norm, double t, double limit) {
    if (!(std::abs(norm - 1.0) <= limit)) {
        std::ostringstream os;
        os << "chain norm drift " << std::abs(norm - 1.0) << " at t = " << t;
        throw NumericalError(os.str());
    }
}

}  // namespace

ChainModel ChainModel::build(const FiniteChain& chain, const SystemParams& params) {
    validate(SpectralDensity{chain});
    if (!(params.gamma >= 0.0) || !std::isfinite(params.e0)) throw ConfigurationError("ChainModel: bad parameters");
    ChainModel m;
    m.n_levels = chain.n_levels;
    m.w_band = chain.w_band;
    m.e0 = params.e0;
    m.gamma = params.gamma;
    m.energies = chain_levels(chain.n_levels, chain.w_band);
    m.couplings = chain_couplings(chain.n_levels, chain.w_band, params.gamma);
    return m;
}

Eigen::MatrixXd ChainModel::hamiltonian() const {
    const auto n = static_cast<Eigen::Index>(energies.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    h(0, 0) = e0;
    for (Eigen::Index r = 0; r < n; ++r) {
        h(r + 1, r + 1) = energies[static_cast<std::size_t>(r)];
        h(0, r + 1) = h(r + 1, 0) = couplings[static_cast<std::size_t>(r)];
    }
    return h;
}

std::vector<double> ChainSeries::survival() const {
    std::vector<double> p(b0.size());
    std::transform(b0.begin(), b0.end(), p.begin(), [](const Complex& b) { return std::norm(b); });
    return p;
}

double ChainSeries::max_norm_drift() const {
    double m = 0.0;
    for (double x : norm) m = std::max(m, std::abs(x - 1.0));
    return m;
}

ChainSeries evolve_chain(const ChainModel& model, const DriveProfile& drive, double t_end, double dt,
                         const ChainOptions& opts) {
    if (!(dt > 0.0) || !(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigurationError("evolve_chain: need dt > 0, t_end >= 0");
    const std::size_t steps = t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    const double h = steps == 0 ? dt : t_end / static_cast<double>(steps);

    // |E0| + u is the largest level excursion sampled on the step grid.
    double e0_span = std::abs(model.e0);
    if (drive.kind != DriveProfile::Kind::constant) {
        for (std::size_t k = 0; k < 2 * steps; ++k) e0_span = std::max(e0_span, std::abs(drive.e0_of_t(0.5 * k * h)));
    }
    const double product = h * (model.w_band + e0_span);
    if (product > 0.05 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "resolution rule violated: dt * (W + |E0| + u) = " << product << " > 0.05";
        throw ConfigurationError(os.str());
    }

    const auto n = static_cast<Eigen::Index>(model.energies.size());
    ChainSeries out;
    out.times.reserve(steps + 1);
    out.b0.reserve(steps + 1);

    const auto record_state = [&](double t, const Eigen::VectorXcd& psi) {
        const double nrm = psi.squaredNorm();
        check_norm(nrm, t, opts.norm_limit);
        out.norm_times.push_back(t);
        out.norm.push_back(nrm);
        if (opts.keep_states) out.states.push_back({psi(0), psi.tail(n), t});
    };
    const auto record = [&](double t, const Eigen::VectorXcd& psi) {
        out.times.push_back(t);
        out.b0.push_back(psi(0));
        record_state(t, psi);
    };

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n + 1);
    psi(0) = 1.0;

    if (drive.kind == DriveProfile::Kind::constant) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.hamiltonian());
        if (es.info() != Eigen::Success) throw NumericalError("evolve_chain: eigendecomposition failed");
        const Eigen::MatrixXd& v = es.eigenvectors();
        const Eigen::VectorXd& lam = es.eigenvalues();
        const Eigen::VectorXd c0 = v.row(0).transpose();  // overlap of each eigenvector with the well
        const Eigen::VectorXcd c0c = c0.cast<Complex>();
        const std::size_t stride = opts.keep_states ? 1 : std::max<std::size_t>(opts.norm_stride, 1);
        Eigen::VectorXcd coef(n + 1);
        for (std::size_t k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * h;
            for (Eigen::Index j = 0; j <= n; ++j) coef(j) = c0(j) * std::exp(-I * (lam(j) * t));
            out.times.push_back(t);
            out.b0.push_back(c0c.dot(coef));
            if (k % stride == 0 || k == steps) {
                psi.noalias() = v * coef;
                record_state(t, psi);
            }
        }
    } else {
        // Site-basis coupling direction and strength.
        Eigen::VectorXd om(n);
        for (Eigen::Index r = 0; r < n; ++r) om(r) = model.couplings[static_cast<std::size_t>(r)];
        const double om_norm = om.norm();
        const Eigen::VectorXd om_hat = om_norm > 0.0 ? Eigen::VectorXd(om / om_norm) : Eigen::VectorXd::Zero(n);
        Eigen::VectorXcd half_chain(n);
        for (Eigen::Index r = 0; r < n; ++r)
            half_chain(r) = std::exp(-I * (0.5 * h * model.energies[static_cast<std::size_t>(r)]));

        record(0.0, psi);
        for (std::size_t k = 0; k < steps; ++k) {
            const double tm = (static_cast<double>(k) + 0.5) * h;
            const Complex half_well = std::exp(-I * (0.5 * h * drive.e0_of_t(tm)));
            const auto diag = [&]() {
                psi(0) *= half_well;
                psi.tail(n).array() *= half_chain.array();
            };
            diag();
            // exp(-i phi sigma_x) in span{well, om_hat}.
            const double phi = drive.w_of_t(tm) * h * om_norm;
            const Complex a = psi(0);
            const Complex p = om_hat.dot(psi.tail(n));
            const double c = std::cos(phi);
            const double s = std::sin(phi);
            const Complex a_new = c * a - I * s * p;
            const Complex p_new = c * p - I * s * a;
            psi(0) = a_new;
            psi.tail(n) += (p_new - p) * om_hat.cast<Complex>();
            diag();
            record(static_cast<double>(k + 1) * h, psi);
        }
    }
    out.final_state = {psi(0), psi.tail(n), out.times.back()};
    return out;
}

std::optional<double> revival_time(const std::vector<double>& times, const std::vector<double>& p0, double fall,
                                   double rise) {
    if (times.size() != p0.size()) throw ConfigurationError("revival_time: size mismatch");
    const auto below = std::find_if(p0.begin(), p0.end(), [&](double p) { return p < fall; });
    if (below == p0.end()) throw ConfigurationError("revival_time: series too short, P0 never falls below threshold");
    for (auto k = static_cast<std::size_t>(below - p0.begin()) + 1; k < p0.size(); ++k) {
        if (p0[k] > rise) {
            const double s = (rise - p0[k - 1]) / (p0[k] - p0[k - 1]);
            return times[k - 1] + s * (times[k] - times[k - 1]);
        }
    }
    return std::nullopt;
}

std::optional<double> revival_time(const ChainSeries& series, double fall, double rise) {
    return revival_time(series.times, series.survival(), fall, rise);
}

EnergySpectrum lineshape_exact(const ChainState& state, const ChainModel& model) {
    EnergySpectrum s;
    s.time = state.time;
    const std::size_t n = model.energies.size();
    if (static_cast<std::size_t>(state.br.size()) != n) throw ConfigurationError("lineshape_exact: state size mismatch");
    s.energies.resize(n);
    s.values.resize(n);
    const double w2 = model.w_band * model.w_band;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t r = n - 1 - k;  // ascending energy
        const double e = model.energies[r];
        const double rho = (model.n_levels + 1) / (pi * std::sqrt(w2 - e * e));
        s.energies[k] = e;
        s.values[k] = std::norm(state.br(static_cast<Eigen::Index>(r))) * rho;
    }
    s.norm = trapezoid(s.energies, s.values);
    return s;
}

EnergySpectrum lineshape_exact(const ChainSeries& series, const ChainModel& model) {
    return lineshape_exact(series.final_state, model);
}

}  // namespace decaysim
