#include "ccmkit/error.hpp"
#include "ccmkit/linalg.hpp"
#include "ccmkit/numerics.hpp"
#include "ccmkit/preprocess.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ccmkit;
using fixtures::series;

namespace {

double seasonal_wave(std::size_t t) { return std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 12.0); }

TimeSeries trend_plus_wave(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = 0.1 * static_cast<double>(t + 1) + seasonal_wave(t + 1);
    return series("x", v);
}

} // namespace

TEST_SUITE("preprocess") {

TEST_CASE("least squares agrees with normal equations") {
    RandomStream rng(17, 1);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 60, p = 5;
        Eigen::MatrixXd x(n, p);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
            y(i) = rng.normal();
        }
        const auto fit = least_squares(x, y);
        const Eigen::VectorXd oracle = (x.transpose() * x).inverse() * (x.transpose() * y);
        CHECK((fit.coefficients - oracle).norm() / oracle.norm() < 1e-8);
        CHECK(fit.rss == doctest::Approx((y - x * oracle).squaredNorm()).epsilon(1e-10));
        CHECK_FALSE(fit.rank_deficient);
    }
    Eigen::MatrixXd dup(10, 2);
    for (int i = 0; i < 10; ++i) dup(i, 0) = dup(i, 1) = i;
    CHECK(least_squares(dup, Eigen::VectorXd::Ones(10)).rank_deficient);
}

TEST_CASE("adf on hand-sized inputs") {
    CHECK_THROWS_AS(adf_test(series("c", std::vector<double>(50, 3.0))), Error);
    CHECK_THROWS_AS(adf_test(series("short", fixtures::white_noise(10, 1))), Error);
    const auto wn = adf_test(series("wn", fixtures::white_noise(2000, 5)));
    CHECK(wn.reject_5pct);
    CHECK(wn.observations == 1998);
}

TEST_CASE("adf rejection rates") {
    int walk_rejects = 0;
    int noise_rejects = 0;
    constexpr int trials = 500;
    for (int i = 0; i < trials; ++i) {
        walk_rejects += adf_test(series("rw", fixtures::random_walk(2000, 1000 + i))).reject_5pct;
        noise_rejects += adf_test(series("wn", fixtures::white_noise(2000, 5000 + i))).reject_5pct;
    }
    CHECK(walk_rejects <= trials / 10);
    CHECK(noise_rejects >= trials * 95 / 100);
}

TEST_CASE("split summary test") {
    const auto flat = split_summary_test(series("a", {1, 1, 1, 1}));
    CHECK(flat.mean_gap == 0.0);
    CHECK(flat.constant_half);
    const auto shift = split_summary_test(series("b", {0, 0, 10, 10}));
    CHECK(shift.mean_gap > 1.0);
    CHECK(shift.variance_ratio == 1.0);
    CHECK(shift.constant_half);
    const auto noise = split_summary_test(series("c", fixtures::white_noise(10000, 3)));
    CHECK(noise.mean_gap < 0.05);
    CHECK(noise.variance_ratio < 1.1);
    CHECK_THROWS_AS(split_summary_test(series("d", {1, 2, 3})), Error);
}

TEST_CASE("stationarity verdicts") {
    CHECK(stationarity_report(series("wn", fixtures::white_noise(2000, 8))).verdict == StationarityVerdict::stationary);
    std::vector<double> drift(2000);
    for (std::size_t t = 0; t < drift.size(); ++t) drift[t] = 0.01 * static_cast<double>(t);
    auto walk = fixtures::random_walk(2000, 9);
    for (std::size_t t = 0; t < walk.size(); ++t) walk[t] += drift[t] * 5;
    CHECK(stationarity_report(series("rw", walk)).verdict == StationarityVerdict::nonstationary);
}

TEST_CASE("decomposition of a constant") {
    const auto d = decompose_additive(series("c", std::vector<double>(24, 7.0)), 4);
    for (std::size_t t = 0; t < 24; ++t) {
        CHECK(d.seasonal[t] == doctest::Approx(0.0));
        if (t >= d.interior_begin() && t < d.interior_end()) {
            CHECK(d.trend[t] == doctest::Approx(7.0));
            CHECK(d.residual[t] == doctest::Approx(0.0));
        } else {
            CHECK(std::isnan(d.trend[t]));
        }
    }
    CHECK_THROWS_AS(decompose_additive(series("s", {1, 2, 3, 4, 5, 6}), 5), Error);
    CHECK_THROWS_AS(decompose_additive(series("s", {1, 2, 3, 4, 5, 6}), 0), Error);
}

TEST_CASE("decomposition reconstructs and recovers a sinusoid") {
    const auto x = trend_plus_wave(240);
    for (std::size_t period : {3, 4, 7, 12}) {
        const auto d = decompose_additive(x, period);
        double total = 0.0;
        for (double s : d.seasonal_indexes) total += s;
        CHECK(std::fabs(total) < 1e-9);
        for (std::size_t t = d.interior_begin(); t < d.interior_end(); ++t) {
            CHECK(std::fabs(d.trend[t] + d.seasonal[t] + d.residual[t] - x.values[t]) < 1e-9);
        }
        for (std::size_t t = period; t < x.length(); ++t) CHECK(d.seasonal[t] == d.seasonal[t - period]);
    }
    const auto d = decompose_additive(x, 12);
    double se = 0.0;
    std::size_t count = 0;
    for (std::size_t t = d.interior_begin(); t < d.interior_end(); ++t) {
        se += std::pow(d.seasonal[t] - seasonal_wave(t + 1), 2);
        ++count;
    }
    CHECK(std::sqrt(se / static_cast<double>(count)) < 0.05);
}

TEST_CASE("deseasonalize") {
    const auto flat = series("c", std::vector<double>(30, 2.0));
    CHECK(deseasonalize(flat, 6).values == flat.values);

    std::vector<double> wave(240);
    for (std::size_t t = 0; t < wave.size(); ++t) wave[t] = seasonal_wave(t + 1);
    const auto out = deseasonalize(series("w", wave), 12);
    double before = 0.0, after = 0.0;
    for (std::size_t t = 6; t < 234; ++t) {
        before += wave[t] * wave[t];
        after += out.values[t] * out.values[t];
    }
    CHECK(std::sqrt(after) <= 0.1 * std::sqrt(before));
    const auto again = decompose_additive(deseasonalize(trend_plus_wave(240), 12), 12);
    for (double s : again.seasonal_indexes) CHECK(std::fabs(s) < 1e-6);
}

TEST_CASE("exponential smoothing") {
    const auto x = series("x", fixtures::white_noise(200, 4));
    CHECK(exp_smooth(x, 1.0).values == x.values);
    const auto flat = series("c", std::vector<double>(10, 3.5));
    CHECK(exp_smooth(flat, 0.3).values == flat.values);
    const auto two = exp_smooth(series("h", {0, 1}), 0.2);
    CHECK(two.values[0] == 0.0);
    CHECK(two.values[1] == doctest::Approx(0.2).epsilon(1e-15));
    const auto s = exp_smooth(x, kDefaultSmoothingAlpha);
    const auto sx = summary(x.values);
    for (double v : s.values) {
        CHECK(v >= sx.min);
        CHECK(v <= sx.max);
    }
    CHECK_THROWS_AS(exp_smooth(x, 0.0), Error);
    CHECK_THROWS_AS(exp_smooth(x, 1.5), Error);
}

TEST_CASE("standardize") {
    const auto z = standardize(series("x", {1, 2, 3}));
    CHECK(z.values[0] == doctest::Approx(-1.224745).epsilon(1e-6));
    CHECK(z.values[1] == doctest::Approx(0.0));
    CHECK(z.values[2] == doctest::Approx(1.224745).epsilon(1e-6));
    CHECK_THROWS_AS(standardize(series("c", {5, 5, 5})), Error);

    auto raw = fixtures::white_noise(1000, 12);
    for (auto& v : raw) v = 40.0 + 3.0 * v;
    const auto s = standardize(series("x", raw));
    const auto st = summary(s.values);
    CHECK(std::fabs(st.mean) < 1e-9);
    CHECK(std::fabs(std::sqrt(st.variance) - 1.0) < 1e-9);
    const auto twice = standardize(s);
    std::vector<double> affine(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) affine[i] = 0.01 * raw[i] - 9.0;
    const auto sa = standardize(series("y", affine));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(std::fabs(twice.values[i] - s.values[i]) < 1e-9);
        CHECK(std::fabs(sa.values[i] - s.values[i]) < 1e-9);
    }
}

TEST_CASE("pipeline applies steps in fixed order") {
    const auto x = trend_plus_wave(120);
    PipelineOptions opt;
    opt.deseasonalize_period = 12;
    opt.smoothing_alpha = 0.3;
    opt.standardize = true;
    const auto piped = preprocess_series(x, opt);
    const auto manual = standardize(exp_smooth(deseasonalize(x, 12), 0.3));
    for (std::size_t t = 0; t < x.length(); ++t) CHECK(std::fabs(piped.values[t] - manual.values[t]) < 1e-12);
}

} // TEST_SUITE
