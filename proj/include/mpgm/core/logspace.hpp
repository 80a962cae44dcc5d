#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace mpgm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Normalize log weights into a probability vector.
inline std::vector<double> normalized_from_log(std::span<const double> logw) {
    const double z = log_sum_exp(logw);
    std::vector<double> p(logw.size(), 0.0);
    if (z == kNegInf) return p;  // caller decides how to treat all-zero mass
    for (std::size_t i = 0; i < logw.size(); ++i) p[i] = std::exp(logw[i] - z);
    return p;
}

/// Total variation distance between two distributions on the same support.
inline double total_variation(std::span<const double> p, std::span<const double> q) {
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return 0.5 * tv;
}

}  // namespace mpgm
