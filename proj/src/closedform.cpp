#include "decaysim/closedform.hpp"

#include "decaysim/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace decaysim::closedform {

namespace {

constexpr Complex I{0.0, 1.0};

void reject_combined(const SystemParams& p, const char* who) {
    if (p.level_drive && p.barrier_drive)
        throw ConfigurationError(std::string(who) + ": simultaneous level and barrier drives are not supported");
}

}  // namespace

WidebandPhase::WidebandPhase(SystemParams params, BarrierPhase barrier) : params_(std::move(params)), barrier_(barrier) {
    reject_combined(params_, "WidebandPhase");
}

Complex WidebandPhase::operator()(double t) const {
    double real = params_.e0 * t;
    if (params_.level_drive) {
        const double u = params_.level_drive->u;
        const double om = params_.level_drive->omega;
        real += (u / om) * (std::cos(om * t) - 1.0);
    }
    // \int_0^t w^2 dt'
    double width = t;
    if (params_.barrier_drive) {
        const double a = params_.barrier_drive->alpha;
        const double om = params_.barrier_drive->omega;
        width += (2.0 * a / om) * (1.0 - std::cos(om * t));
        if (barrier_ == BarrierPhase::exact) width += a * a * (0.5 * t - std::sin(2.0 * om * t) / (4.0 * om));
    }
    return {real, -0.5 * params_.gamma * sgn(t) * width};
}

LorentzianQ lorentzian_q(const SystemParams& params, double lambda, double t) {
    const double s = sgn(t);
    const double e0 = params.e0;
    const Complex q2{lambda * lambda - 2.0 * params.gamma * lambda - e0 * e0, -2.0 * s * e0 * lambda};
    return {std::sqrt(q2), s};
}

Complex b0_markovian_static(const SystemParams& params, double t) {
    return std::exp(Complex{-0.5 * params.gamma * std::abs(t), -params.e0 * t});
}

Complex b0_markovian_driven(const SystemParams& params, double t, BarrierPhase barrier) {
    const WidebandPhase phase(params, barrier);
    return std::exp(-I * phase(t));
}

Complex b0_lorentzian_static(const SystemParams& params, double lambda, double t) {
    if (!(lambda > 0.0)) throw ConfigurationError("b0_lorentzian_static: lambda must be > 0");
    const double a = std::abs(t);
    const LorentzianQ q = lorentzian_q(params, lambda, t);
    const Complex amp = lambda - I * q.branch_sign * params.e0;
    const Complex z = 0.5 * q.q * a;
    const Complex base{-0.5 * lambda * a, -0.5 * params.e0 * t};
    if (std::abs(z) < 1e-3) {
        // cosh z + amp (a/2) sinh(z)/z, Taylor expanded.
        const Complex z2 = z * z;
        const Complex cosh_z = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
        const Complex sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
        return std::exp(base) * (cosh_z + amp * (0.5 * a) * sinhc);
    }
    // e^{-lambda a/2} cosh/sinh written as two decaying exponentials.
    const Complex ep = std::exp(base + z);
    const Complex em = std::exp(base - z);
    return 0.5 * (ep + em) + (amp / q.q) * 0.5 * (ep - em);
}

std::pair<double, double> short_time_coefficients(const SystemParams& params, double lambda) {
    return {0.5 * params.gamma * lambda, params.gamma * lambda * lambda / 6.0};
}

double lineshape_markovian(const SystemParams& params, double e_r, double t) {
    if (!(t >= 0.0)) throw ConfigurationError("lineshape_markovian: t must be >= 0");
    const double g = params.gamma;
    const double d = e_r - params.e0;
    const double denom = d * d + 0.25 * g * g;
    if (std::isinf(t)) return g / (2.0 * pi) / denom;
    const double num = 1.0 - 2.0 * std::cos(d * t) * std::exp(-0.5 * g * t) + std::exp(-g * t);
    return g / (2.0 * pi) * num / denom;
}

FloquetSpectrum FloquetSpectrum::level(const SystemParams& params, double tolerance) {
    reject_combined(params, "FloquetSpectrum::level");
    if (!params.level_drive) throw ConfigurationError("FloquetSpectrum::level: no level drive");
    FloquetSpectrum f;
    f.e0_ = params.e0;
    f.gamma_ = params.gamma;
    f.width_ = params.gamma;
    f.omega_ = params.level_drive->omega;
    const double x = params.level_drive->u / f.omega_;
    f.n_max_ = specfun::truncation_order(std::abs(x), tolerance);
    const std::vector<double> j = specfun::bessel_j_orders(f.n_max_, x);
    f.coeff_.resize(2 * static_cast<std::size_t>(f.n_max_) + 1);
    Complex phase_pos{1.0, 0.0};  // (-i)^n
    Complex phase_neg{1.0, 0.0};  // (-i)^{-n} = i^n
    for (int n = 0; n <= f.n_max_; ++n) {
        const double jn = j[static_cast<std::size_t>(n)];
        const double jneg = (n % 2 == 0) ? jn : -jn;
        f.coeff_[static_cast<std::size_t>(f.n_max_ + n)] = phase_pos * jn;
        f.coeff_[static_cast<std::size_t>(f.n_max_ - n)] = phase_neg * jneg;
        phase_pos *= -I;
        phase_neg *= I;
    }
    return f;
}

FloquetSpectrum FloquetSpectrum::barrier(const SystemParams& params, double tolerance, BarrierPhase phase) {
    reject_combined(params, "FloquetSpectrum::barrier");
    if (!params.barrier_drive) throw ConfigurationError("FloquetSpectrum::barrier: no barrier drive");
    if (!(params.barrier_drive->alpha < 1.0)) throw ConfigurationError("FloquetSpectrum::barrier: alpha must be < 1");
    FloquetSpectrum f;
    f.barrier_ = true;
    f.e0_ = params.e0;
    f.gamma_ = params.gamma;
    f.omega_ = params.barrier_drive->omega;
    f.alpha_ = params.barrier_drive->alpha;
    const double xi = f.alpha_ * f.gamma_ / f.omega_;
    const int n_xi = specfun::truncation_order(xi, tolerance);
    const std::vector<double> w = specfun::bessel_i_scaled_orders(n_xi, xi);
    const auto w_at = [&](int n) { return std::abs(n) > n_xi ? 0.0 : w[static_cast<std::size_t>(std::abs(n))]; };

    if (phase == BarrierPhase::linear) {
        f.width_ = f.gamma_;
        f.n_max_ = n_xi;
        f.coeff_.resize(2 * static_cast<std::size_t>(n_xi) + 1);
        for (int n = -n_xi; n <= n_xi; ++n) f.coeff_[static_cast<std::size_t>(n + n_xi)] = w_at(n);
        return f;
    }

    // exp(-(G/2) \int w^2) = e^{-G' t/2} e^{-xi (1 - cos wt)} e^{eta sin 2wt}, G' = G (1 + alpha^2/2).
    // In the z_n = E - E0 - n w convention harmonic e^{i k w t} sits at n = -k.
    f.width_ = f.gamma_ * (1.0 + 0.5 * f.alpha_ * f.alpha_);
    const double eta = f.gamma_ * f.alpha_ * f.alpha_ / (8.0 * f.omega_);
    const int m_max = specfun::truncation_order(eta, tolerance);
    const std::vector<double> v = specfun::bessel_i_scaled_orders(m_max, eta);
    const double eta_scale = std::exp(eta);  // undo the e^{-eta} scaling
    f.n_max_ = n_xi + 2 * m_max;
    f.coeff_.assign(2 * static_cast<std::size_t>(f.n_max_) + 1, Complex{0.0, 0.0});
    for (int m = -m_max; m <= m_max; ++m) {
        const Complex im = std::pow(-I, m) * v[static_cast<std::size_t>(std::abs(m))] * eta_scale;
        for (int j = -n_xi; j <= n_xi; ++j) {
            const int k = j + 2 * m;
            f.coeff_[static_cast<std::size_t>(-k + f.n_max_)] += w_at(j) * im;
        }
    }
    return f;
}

double FloquetSpectrum::operator()(double e_r) const {
    Complex amp{0.0, 0.0};
    const double w2 = omega_ * omega_;
    for (int n = -n_max_; n <= n_max_; ++n) {
        const Complex c = coeff_[static_cast<std::size_t>(n + n_max_)];
        if (c == 0.0) continue;
        const Complex z{e_r - e0_ - n * omega_, 0.5 * width_};
        Complex term = 1.0 / z;
        if (barrier_) term += I * alpha_ * omega_ / (z * z - w2);
        amp += c * term;
    }
    return gamma_ / (2.0 * pi) * std::norm(amp);
}

std::vector<double> FloquetSpectrum::sublevels(double rel_weight) const {
    double biggest = 0.0;
    for (const Complex& c : coeff_) biggest = std::max(biggest, std::abs(c));
    std::vector<double> out;
    for (int n = -n_max_; n <= n_max_; ++n)
        if (std::abs(coeff_[static_cast<std::size_t>(n + n_max_)]) >= rel_weight * biggest) out.push_back(e0_ + n * omega_);
    return out;
}

double floquet_spectrum_level(const SystemParams& params, double e_r) { return FloquetSpectrum::level(params)(e_r); }

double floquet_spectrum_barrier(const SystemParams& params, double e_r) {
    return FloquetSpectrum::barrier(params)(e_r);
}

double integrate_spectrum(const std::function<double(double)>& density, const std::vector<double>& peaks, double width,
                          double tolerance) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(width > 0.0)) throw ConfigurationError("integrate_spectrum: width must be > 0");
    std::vector<double> cuts = peaks;
    if (cuts.empty()) cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<double> nodes;
    nodes.push_back(cuts.front() - 50.0 * width);
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        if (k > 0) nodes.push_back(0.5 * (cuts[k - 1] + cuts[k]));
        nodes.push_back(cuts[k]);
    }
    nodes.push_back(cuts.back() + 50.0 * width);

    const auto f = [&](double e) { return density(e); };
    constexpr unsigned depth = 20;
    const double inf = std::numeric_limits<double>::infinity();
    double total = gauss_kronrod<double, 61>::integrate(f, -inf, nodes.front(), depth, tolerance);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
        total += gauss_kronrod<double, 61>::integrate(f, nodes[k], nodes[k + 1], depth, tolerance);
    total += gauss_kronrod<double, 61>::integrate(f, nodes.back(), inf, depth, tolerance);
    return total;
}

}  // namespace decaysim::closedform
