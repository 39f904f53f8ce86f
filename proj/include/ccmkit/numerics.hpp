#pragma once

#include <cstddef>
#include <span>

namespace ccmkit {

/// Pearson correlation. When either input has zero variance the value is the
/// sentinel 0 and `degenerate` is set; callers decide whether that is fatal.
struct Correlation {
    double rho = 0.0;
    bool degenerate = false;
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0; // population convention (divide by n)
    double min = 0.0;
    double max = 0.0;
};

SummaryStats summary(std::span<const double> x);

/// True when every element compares equal to the first one.
bool is_constant(std::span<const double> x) noexcept;

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation with the usual symmetry switch at x = (a+1)/(a+b+2).
double reg_inc_beta(double x, double a, double b);

/// Upper-tail probability P(F > f) of the F(d1, d2) distribution.
double f_sf(double f, int d1, int d2);

/// Kendall tau-b rank correlation. Zero when either side is entirely tied.
double kendall_tau(std::span<const double> x, std::span<const double> y);

} // namespace ccmkit
