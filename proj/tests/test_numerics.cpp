#include "ccmkit/error.hpp"
#include "ccmkit/numerics.hpp"
#include "ccmkit/random.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

using namespace ccmkit;

namespace {

// Adaptive Simpson, used as an independent oracle for the incomplete beta.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50);
}

} // namespace

TEST_SUITE("numerics") {

TEST_CASE("pearson on hand examples") {
    const std::vector<double> a{1, 2, 3};
    CHECK(pearson(a, a).rho == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(a, std::vector<double>{3, 2, 1}).rho == doctest::Approx(-1.0).epsilon(1e-15));
    const auto c = pearson(a, std::vector<double>{5, 5, 5});
    CHECK(c.rho == 0.0);
    CHECK(c.degenerate);
    CHECK_THROWS_AS(pearson(a, std::vector<double>{1, 2}), Error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST_CASE("pearson is affine invariant and symmetric") {
    RandomStream rng(3, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(100), y(100), up(100), down(100);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.normal();
            y[i] = rng.normal();
            up[i] = 2.5 * x[i] + 7.0;
            down[i] = -0.3 * x[i] + 1.0;
        }
        CHECK(std::fabs(pearson(x, up).rho - 1.0) <= 1e-12);
        CHECK(std::fabs(pearson(x, down).rho + 1.0) <= 1e-12);
        CHECK(pearson(x, y).rho == pearson(y, x).rho);
        CHECK(std::fabs(pearson(x, y).rho) <= 1.0);
    }
}

TEST_CASE("summary statistics") {
    const auto s = summary(std::vector<double>{1, 2, 3});
    CHECK(s.n == 3);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const auto one = summary(std::vector<double>{5});
    CHECK(one.mean == 5.0);
    CHECK(one.variance == 0.0);
    CHECK_THROWS_AS(summary(std::vector<double>{}), Error);

    RandomStream rng(2024, 7);
    std::vector<double> draws(1000000);
    for (auto& v : draws) v = rng.normal();
    const auto big = summary(draws);
    CHECK(std::fabs(big.mean) < 0.01);
    CHECK(std::fabs(big.variance - 1.0) < 0.01);
    CHECK(big.min <= big.mean);
    CHECK(big.mean <= big.max);
}

TEST_CASE("incomplete beta special values") {
    CHECK(reg_inc_beta(0.25, 1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(reg_inc_beta(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(reg_inc_beta(0.0, 3, 4) == 0.0);
    CHECK(reg_inc_beta(1.0, 3, 4) == 1.0);
    CHECK_THROWS_AS(reg_inc_beta(1.5, 1, 1), Error);
    CHECK_THROWS_AS(reg_inc_beta(0.5, 0, 1), Error);
    CHECK_THROWS_AS(reg_inc_beta(0.5, 1, -1), Error);
}

TEST_CASE("incomplete beta against quadrature") {
    // I_x(a, b) = int_0^x t^(a-1) (1-t)^(b-1) dt / B(a, b); B(2, 5) = 1/30.
    const double oracle = 30.0 * integrate([](double t) { return t * std::pow(1.0 - t, 4); }, 0.0, 0.3, 1e-14);
    CHECK(std::fabs(reg_inc_beta(0.3, 2, 5) - oracle) < 1e-10);

    for (double a : {0.7, 2.5, 9.0}) {
        for (double b : {1.3, 4.0, 12.0}) {
            const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
            // Substituting t = u^(1/a) removes the singularity at 0 for a < 1.
            auto g = [&](double u) { return std::exp((b - 1) * std::log1p(-std::pow(u, 1.0 / a)) - log_beta) / a; };
            for (double x : {0.2, 0.5, 0.8}) {
                const double q = integrate(g, 0.0, std::pow(x, a), 1e-13);
                CHECK(std::fabs(reg_inc_beta(x, a, b) - q) < 1e-8);
            }
        }
    }
}

TEST_CASE("incomplete beta reflection and monotonicity") {
    const std::array<double, 7> xs{0.001, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999};
    const std::array<double, 7> shapes{0.5, 1.0, 2.0, 3.5, 10.0, 50.0, 200.0};
    for (double a : shapes) {
        for (double b : shapes) {
            double prev = 0.0;
            for (double x : xs) {
                const double v = reg_inc_beta(x, a, b);
                CHECK(std::fabs(v - (1.0 - reg_inc_beta(1.0 - x, b, a))) <= 1e-12);
                CHECK(v >= prev);
                CHECK(v <= 1.0);
                prev = v;
            }
        }
    }
}

TEST_CASE("F tail probability") {
    CHECK(std::fabs(f_sf(1.0, 1, 1) - 0.5) < 1e-9);
    CHECK(f_sf(0.0, 3, 7) == 1.0);
    // d1 = 2 has the closed form (1 + 2f/d2)^(-d2/2).
    CHECK(std::fabs(f_sf(4.0, 2, 10) - std::pow(1.8, -5.0)) < 1e-12);
    CHECK_THROWS_AS(f_sf(1.0, 0, 3), Error);
    CHECK_THROWS_AS(f_sf(-1.0, 1, 3), Error);
    double prev = 1.0;
    for (double f = 0.1; f < 20.0; f += 0.7) {
        const double p = f_sf(f, 3, 17);
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("F tail probability against Monte Carlo") {
    // Ratio of scaled chi-square variates, drawn with the standard library.
    std::mt19937_64 gen(99);
    std::chi_squared_distribution<double> c1(2.0);
    std::chi_squared_distribution<double> c2(10.0);
    constexpr long draws = 10000000;
    long above = 0;
    for (long i = 0; i < draws; ++i) {
        if ((c1(gen) / 2.0) / (c2(gen) / 10.0) > 4.0) ++above;
    }
    const double p_hat = static_cast<double>(above) / draws;
    const double se = std::sqrt(p_hat * (1 - p_hat) / draws);
    CHECK(std::fabs(f_sf(4.0, 2, 10) - p_hat) < 3 * se);
}

TEST_CASE("kendall tau conventions") {
    const std::vector<double> lib{1, 2, 3, 4, 5};
    CHECK(kendall_tau(lib, std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}) == doctest::Approx(1.0));
    CHECK(kendall_tau(lib, std::vector<double>{0.5, 0.4, 0.3, 0.2, 0.1}) == doctest::Approx(-1.0));
    CHECK(kendall_tau(lib, std::vector<double>{0.3, 0.3, 0.3, 0.3, 0.3}) == 0.0);
    // Brute-force tau-b on data with ties.
    const std::vector<double> x{1, 2, 2, 3, 4, 4, 5};
    const std::vector<double> y{2, 1, 3, 3, 5, 4, 4};
    double conc = 0, disc = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double s = (x[i] - x[j]) * (y[i] - y[j]);
            if (s > 0) ++conc;
            else if (s < 0) ++disc;
            else if (x[i] == x[j] && y[i] != y[j]) ++tx;
            else if (y[i] == y[j] && x[i] != x[j]) ++ty;
        }
    }
    const double expected = (conc - disc) / std::sqrt((conc + disc + tx) * (conc + disc + ty));
    CHECK(kendall_tau(x, y) == doctest::Approx(expected).epsilon(1e-14));
}

} // TEST_SUITE
