// specfun.hpp — Integer-order Bessel functions J_n and I_n for real arguments

#pragma once

#include <vector>

namespace decaysim::specfun {

/// Range of orders kept in a truncated Floquet sum.
struct BesselOrderRange {
    int n_min{0};
    int n_max{0};
    double tolerance{1e-10};
};

// Supported argument ranges.
inline constexpr double max_j_argument = 1e4;
inline constexpr double max_i_argument = 700.0;

/// J_n(x). Miller backward recurrence normalized with J_0 + 2 sum J_2k = 1;
/// ascending series for |x| < 1. Absolute error below 1e-12 for |x| < 1e4.
/// Throws std::domain_error outside that range.
double bessel_j(int n, double x);

/// J_0(x) .. J_{n_max}(x) from a single backward sweep.
std::vector<double> bessel_j_orders(int n_max, double x);

/// I_n(x). Throws std::overflow_error when e^{|x|} is not representable
/// (|x| >= 700).
double bessel_i(int n, double x);

/// e^{-|x|} I_n(x), finite for every real x.
double bessel_i_scaled(int n, double x);

/// e^{-|x|} I_0(x) .. e^{-|x|} I_{n_max}(x) from a single backward sweep.
std::vector<double> bessel_i_scaled_orders(int n_max, double x);

/// Smallest n_max with sum_{|n|>n_max} J_n(x)^2 < tolerance and
/// sum_{|n|>n_max} e^{-x} I_n(x) < tolerance, never below ceil(x) + 10.
int truncation_order(double x, double tolerance);

inline BesselOrderRange order_range(double x, double tolerance) {
    const int n = truncation_order(x, tolerance);
    return {-n, n, tolerance};
}

}  // namespace decaysim::specfun
