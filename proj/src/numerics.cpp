#include "ccmkit/numerics.hpp"

#include "ccmkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ccmkit {

namespace {

constexpr double kBetaTolerance = 1e-12;
constexpr int kBetaMaxIterations = 300;
constexpr double kTiny = 1e-300;

double log_gamma(double v) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(v, &sign);
#else
    return std::lgamma(v);
#endif
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kBetaTolerance) return h;
    }
    return h;
}

} // namespace

bool is_constant(std::span<const double> x) noexcept {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        fail(ErrorCode::length_mismatch,
             "pearson: lengths differ (" + std::to_string(x.size()) + " vs " +
                 std::to_string(y.size()) + ")");
    }
    if (x.size() < 2) fail(ErrorCode::insufficient_data, "pearson: need at least 2 values");
    if (is_constant(x) || is_constant(y)) return {0.0, true};

    const double n = static_cast<double>(x.size());
    double sum_x = 0.0;
    double sum_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum_x += x[i];
        sum_y += y[i];
    }
    const double mean_x = sum_x / n;
    const double mean_y = sum_y / n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return {0.0, true};
    const double rho = sxy / std::sqrt(sxx * syy);
    return {std::clamp(rho, -1.0, 1.0), false};
}

SummaryStats summary(std::span<const double> x) {
    if (x.empty()) fail(ErrorCode::insufficient_data, "summary: empty input");
    SummaryStats s;
    s.n = x.size();
    s.min = x.front();
    s.max = x.front();
    double sum = 0.0;
    for (double v : x) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.n);
    // Rounding in the mean can push it a hair outside [min, max].
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        fail(ErrorCode::invalid_argument, "reg_inc_beta: shape parameters must be positive and finite");
    }
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCode::invalid_argument, "reg_inc_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    const double front = std::exp(log_front);
    double value = 0.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        value = front * beta_continued_fraction(x, a, b) / a;
    } else {
        value = 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
    }
    return std::clamp(value, 0.0, 1.0);
}

double f_sf(double f, int d1, int d2) {
    if (d1 <= 0 || d2 <= 0) fail(ErrorCode::invalid_argument, "f_sf: degrees of freedom must be positive");
    if (std::isnan(f) || f < 0.0) fail(ErrorCode::invalid_argument, "f_sf: statistic must be nonnegative");
    if (f == 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double n1 = d1;
    const double n2 = d2;
    return reg_inc_beta(n2 / (n2 + n1 * f), n2 / 2.0, n1 / 2.0);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorCode::length_mismatch, "kendall_tau: lengths differ");
    if (x.size() < 2) fail(ErrorCode::insufficient_data, "kendall_tau: need at least 2 values");
    double concordant = 0.0;
    double discordant = 0.0;
    double untied_x = 0.0;
    double untied_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx != 0.0) untied_x += 1.0;
            if (dy != 0.0) untied_y += 1.0;
            const double s = dx * dy;
            if (s > 0.0) concordant += 1.0;
            if (s < 0.0) discordant += 1.0;
        }
    }
    const double denom = std::sqrt(untied_x * untied_y);
    if (denom == 0.0) return 0.0;
    return (concordant - discordant) / denom;
}

} // namespace ccmkit
