#include "ccmkit/preprocess.hpp"

#include "ccmkit/error.hpp"
#include "ccmkit/linalg.hpp"
#include "ccmkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

namespace ccmkit {

AdfResult adf_test(const TimeSeries& x, std::size_t lag_order) {
    const std::size_t n = x.length();
    if (n < lag_order + 10) {
        fail(ErrorCode::insufficient_data, "adf_test: series '" + x.name + "' has " + std::to_string(n) +
                                               " values, need at least lag_order + 10");
    }
    const auto& v = x.values;
    const std::size_t first = lag_order + 1;
    const auto rows = static_cast<Eigen::Index>(n - first);
    const auto cols = static_cast<Eigen::Index>(2 + lag_order);
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd response(rows);
    for (std::size_t t = first; t < n; ++t) {
        const auto r = static_cast<Eigen::Index>(t - first);
        response(r) = v[t] - v[t - 1];
        design(r, 0) = 1.0;
        design(r, 1) = v[t - 1];
        for (std::size_t i = 1; i <= lag_order; ++i) {
            design(r, static_cast<Eigen::Index>(1 + i)) = v[t - i] - v[t - i - 1];
        }
    }
    const auto fit = least_squares(design, response);
    const double dof = static_cast<double>(rows - cols);
    const double s2 = fit.rss / dof;
    if (fit.rank_deficient || !(s2 > 0.0)) {
        fail(ErrorCode::singular, "adf_test: singular regression for series '" + x.name + "'");
    }
    AdfResult out;
    out.statistic = fit.coefficients(1) / std::sqrt(s2 * fit.unscaled_covariance(1, 1));
    out.reject_5pct = out.statistic < kAdfCritical5Pct;
    out.lag_order = lag_order;
    out.observations = static_cast<std::size_t>(rows);
    return out;
}

SplitSummary split_summary_test(const TimeSeries& x) {
    if (x.length() < 4) fail(ErrorCode::insufficient_data, "split_summary_test: need at least 4 values");
    const std::span<const double> all(x.values);
    const std::size_t half = all.size() / 2;
    const auto first = summary(all.first(half));
    const auto second = summary(all.subspan(half));
    const double n1 = static_cast<double>(first.n);
    const double n2 = static_cast<double>(second.n);
    const double pooled_sd = std::sqrt((n1 * first.variance + n2 * second.variance) / (n1 + n2));

    SplitSummary out;
    const double gap = std::fabs(first.mean - second.mean);
    if (pooled_sd > 0.0) {
        out.mean_gap = gap / pooled_sd;
    } else {
        out.mean_gap = gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    const bool c1 = is_constant(all.first(half));
    const bool c2 = is_constant(all.subspan(half));
    out.constant_half = c1 || c2;
    if (c1 && c2) {
        out.variance_ratio = 1.0;
    } else if (c1 || c2) {
        out.variance_ratio = std::numeric_limits<double>::infinity();
    } else {
        out.variance_ratio = std::max(first.variance, second.variance) / std::min(first.variance, second.variance);
    }
    return out;
}

std::string_view to_string(StationarityVerdict verdict) noexcept {
    switch (verdict) {
    case StationarityVerdict::stationary: return "stationary";
    case StationarityVerdict::nonstationary: return "nonstationary";
    case StationarityVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

StationarityReport stationarity_report(const TimeSeries& x, std::size_t adf_lag,
                                       StationarityThresholds thresholds) {
    const auto adf = adf_test(x, adf_lag);
    const auto split = split_summary_test(x);
    StationarityReport rep;
    rep.adf_statistic = adf.statistic;
    rep.adf_reject_5pct = adf.reject_5pct;
    rep.split_mean_gap = split.mean_gap;
    rep.split_variance_ratio = split.variance_ratio;
    rep.split_constant_half = split.constant_half;
    const bool split_ok = !split.constant_half && split.mean_gap <= thresholds.max_mean_gap &&
                          split.variance_ratio <= thresholds.max_variance_ratio;
    if (adf.reject_5pct && split_ok) {
        rep.verdict = StationarityVerdict::stationary;
    } else if (!adf.reject_5pct && !split_ok) {
        rep.verdict = StationarityVerdict::nonstationary;
    } else {
        rep.verdict = StationarityVerdict::inconclusive;
    }
    return rep;
}

DecompositionResult decompose_additive(const TimeSeries& x, std::size_t period) {
    if (period == 0) fail(ErrorCode::invalid_argument, "decompose_additive: period must be positive");
    const std::size_t n = x.length();
    if (n < 2 * period) {
        fail(ErrorCode::insufficient_data, "decompose_additive: series '" + x.name + "' has " +
                                               std::to_string(n) + " values, period " + std::to_string(period) +
                                               " needs at least " + std::to_string(2 * period));
    }
    const auto& v = x.values;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::size_t half = period / 2;

    DecompositionResult out;
    out.period = period;
    out.trend.assign(n, nan);
    out.residual.assign(n, nan);
    // Centered moving average; even windows use the 2xMA with half weights
    // at both ends.
    for (std::size_t t = half; t + half < n; ++t) {
        double acc = 0.0;
        if (period % 2 == 1) {
            for (std::size_t j = t - half; j <= t + half; ++j) acc += v[j];
        } else {
            acc = 0.5 * v[t - half] + 0.5 * v[t + half];
            for (std::size_t j = t - half + 1; j < t + half; ++j) acc += v[j];
        }
        out.trend[t] = acc / static_cast<double>(period);
    }

    std::vector<double> phase_sum(period, 0.0);
    std::vector<std::size_t> phase_count(period, 0);
    for (std::size_t t = half; t + half < n; ++t) {
        phase_sum[t % period] += v[t] - out.trend[t];
        ++phase_count[t % period];
    }
    out.seasonal_indexes.resize(period);
    double centre = 0.0;
    for (std::size_t p = 0; p < period; ++p) {
        out.seasonal_indexes[p] = phase_sum[p] / static_cast<double>(phase_count[p]);
        centre += out.seasonal_indexes[p];
    }
    centre /= static_cast<double>(period);
    for (auto& s : out.seasonal_indexes) s -= centre;

    out.seasonal.resize(n);
    for (std::size_t t = 0; t < n; ++t) out.seasonal[t] = out.seasonal_indexes[t % period];
    for (std::size_t t = half; t + half < n; ++t) out.residual[t] = v[t] - out.trend[t] - out.seasonal[t];
    return out;
}

TimeSeries deseasonalize(const TimeSeries& x, std::size_t period) {
    const auto parts = decompose_additive(x, period);
    std::vector<double> out(x.length());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = x.values[t] - parts.seasonal[t];
    return x.with_values(std::move(out));
}

TimeSeries exp_smooth(const TimeSeries& x, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorCode::invalid_argument, "exp_smooth: alpha must lie in (0, 1]");
    if (x.length() == 0) fail(ErrorCode::insufficient_data, "exp_smooth: empty series");
    std::vector<double> s(x.length());
    s[0] = x.values[0];
    for (std::size_t t = 1; t < s.size(); ++t) {
        const double blended = alpha * x.values[t] + (1.0 - alpha) * s[t - 1];
        // A convex combination; the clamp only absorbs rounding.
        s[t] = std::clamp(blended, std::min(x.values[t], s[t - 1]), std::max(x.values[t], s[t - 1]));
    }
    return x.with_values(std::move(s));
}

TimeSeries standardize(const TimeSeries& x) {
    if (x.length() == 0) fail(ErrorCode::insufficient_data, "standardize: empty series");
    if (is_constant(x.values)) fail(ErrorCode::invalid_argument, "standardize: series '" + x.name + "' is constant");
    const auto stats = summary(x.values);
    const double sd = std::sqrt(stats.variance);
    std::vector<double> out(x.length());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = (x.values[t] - stats.mean) / sd;
    return x.with_values(std::move(out));
}

TimeSeries preprocess_series(const TimeSeries& x, const PipelineOptions& options) {
    TimeSeries current = x;
    if (options.deseasonalize_period) current = deseasonalize(current, *options.deseasonalize_period);
    if (options.smoothing_alpha) current = exp_smooth(current, *options.smoothing_alpha);
    if (options.standardize) current = standardize(current);
    return current;
}

} // namespace ccmkit
