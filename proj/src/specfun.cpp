#include "decaysim/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace decaysim::specfun {

namespace {

constexpr double rescale_threshold = 1e250;
constexpr double rescale_factor = 1e-250;

void check_j_argument(double x) {
    if (!std::isfinite(x) || std::abs(x) >= max_j_argument)
        throw std::domain_error("bessel_j: |x| must be below 1e4, got " + std::to_string(x));
}

// sum_k s^k (x/2)^{2k+n} / (k! (k+n)!) with s = -1 for J and +1 for I.
double ascending_series(int n, double x, double s) {
    const double half = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= half / k;
    double sum = term;
    const double q = half * half;
    for (int k = 0; k < 500; ++k) {
        term *= s * q / ((k + 1.0) * (k + n + 1.0));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

int miller_start(int n_max, double ax, double spread) {
    const double top = std::max(static_cast<double>(n_max), ax);
    int m = static_cast<int>(top) + 30 + static_cast<int>(std::ceil(std::sqrt(spread * top)));
    return m + (m % 2);
}

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace

std::vector<double> bessel_j_orders(int n_max, double x) {
    if (n_max < 0) throw std::invalid_argument("bessel_j_orders: n_max must be >= 0");
    check_j_argument(x);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    const double ax = std::abs(x);
    if (ax == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (ax < 1.0) {
        for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = ascending_series(n, ax, -1.0);
    } else {
        // Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalized by
        // J_0 + 2 sum_{k>=1} J_{2k} = 1.
        const int m = miller_start(n_max, ax, 60.0);
        double next = 0.0;
        double cur = 1e-30;
        double norm = 0.0;
        for (int k = m; k >= 1; --k) {
            if (k <= n_max) out[static_cast<std::size_t>(k)] = cur;
            if (k % 2 == 0) norm += 2.0 * cur;
            const double prev = (2.0 * k / ax) * cur - next;
            next = cur;
            cur = prev;
            if (std::abs(cur) > rescale_threshold) {
                cur *= rescale_factor;
                next *= rescale_factor;
                norm *= rescale_factor;
                for (int j = k; j <= n_max; ++j) out[static_cast<std::size_t>(j)] *= rescale_factor;
            }
        }
        out[0] = cur;
        norm += cur;
        for (double& v : out) v /= norm;
    }
    if (x < 0.0)
        for (int n = 1; n <= n_max; n += 2) out[static_cast<std::size_t>(n)] = -out[static_cast<std::size_t>(n)];
    return out;
}

double bessel_j(int n, double x) {
    check_j_argument(x);
    const int an = std::abs(n);
    const double v = bessel_j_orders(an, x)[static_cast<std::size_t>(an)];
    return n < 0 ? parity_sign(an) * v : v;
}

std::vector<double> bessel_i_scaled_orders(int n_max, double x) {
    if (n_max < 0) throw std::invalid_argument("bessel_i_scaled_orders: n_max must be >= 0");
    if (!std::isfinite(x)) throw std::domain_error("bessel_i: non-finite argument");
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    const double ax = std::abs(x);
    if (ax == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (ax < 1.0) {
        const double scale = std::exp(-ax);
        for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = scale * ascending_series(n, ax, 1.0);
    } else {
        // Backward recurrence I_{k-1} = (2k/x) I_k + I_{k+1}, normalized by
        // I_0 + 2 sum_{k>=1} I_k = e^x, which yields e^{-x} I_n directly.
        int m = n_max + 30 + static_cast<int>(std::ceil(std::sqrt(80.0 * ax)));
        m += m % 2;
        double next = 0.0;
        double cur = 1e-30;
        double norm = 0.0;
        for (int k = m; k >= 1; --k) {
            if (k <= n_max) out[static_cast<std::size_t>(k)] = cur;
            norm += 2.0 * cur;
            const double prev = (2.0 * k / ax) * cur + next;
            next = cur;
            cur = prev;
            if (cur > rescale_threshold) {
                cur *= rescale_factor;
                next *= rescale_factor;
                norm *= rescale_factor;
                for (int j = k; j <= n_max; ++j) out[static_cast<std::size_t>(j)] *= rescale_factor;
            }
        }
        out[0] = cur;
        norm += cur;
        for (double& v : out) v /= norm;
    }
    if (x < 0.0)
        for (int n = 1; n <= n_max; n += 2) out[static_cast<std::size_t>(n)] = -out[static_cast<std::size_t>(n)];
    return out;
}

double bessel_i_scaled(int n, double x) {
    const int an = std::abs(n);
    return bessel_i_scaled_orders(an, x)[static_cast<std::size_t>(an)];
}

double bessel_i(int n, double x) {
    if (std::abs(x) >= max_i_argument)
        throw std::overflow_error("bessel_i: e^|x| not representable for |x| = " + std::to_string(std::abs(x)));
    return bessel_i_scaled(n, x) * std::exp(std::abs(x));
}

int truncation_order(double x, double tolerance) {
    if (!(x >= 0.0)) throw std::invalid_argument("truncation_order: x must be >= 0");
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw std::invalid_argument("truncation_order: tolerance must lie in (0, 1)");
    const int floor_order = static_cast<int>(std::ceil(x)) + 10;
    const int top = floor_order + 60 + 8 * static_cast<int>(std::ceil(std::cbrt(x)));

    const auto first_below = [&](const std::vector<double>& terms) {
        // tail(n) = 2 sum_{k>n} terms[k]
        double tail = 0.0;
        int n = top;
        for (int k = top; k >= 1; --k) {
            tail += 2.0 * terms[static_cast<std::size_t>(k)];
            if (tail >= tolerance) break;
            n = k - 1;
        }
        return n;
    };

    std::vector<double> j2 = bessel_j_orders(top, x);
    for (double& v : j2) v *= v;
    const std::vector<double> iw = bessel_i_scaled_orders(top, x);
    return std::max({floor_order, first_below(j2), first_below(iw)});
}

}  // namespace decaysim::specfun
