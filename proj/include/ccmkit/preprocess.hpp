#pragma once

#include "ccmkit/dataset.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace ccmkit {

// Large-sample Dickey-Fuller critical values, constant-only regression.
inline constexpr double kAdfCritical1Pct = -3.43;
inline constexpr double kAdfCritical5Pct = -2.86;
inline constexpr double kAdfCritical10Pct = -2.57;

struct AdfResult {
    double statistic = 0.0;
    bool reject_5pct = false;
    std::size_t lag_order = 0;
    std::size_t observations = 0;
};

/// t-ratio on gamma in  dx_t = c + gamma*x_{t-1} + sum_i phi_i*dx_{t-i} + e_t.
AdfResult adf_test(const TimeSeries& x, std::size_t lag_order = 1);

struct SplitSummary {
    double mean_gap = 0.0;       // |m1 - m2| / pooled population sd
    double variance_ratio = 1.0; // max(v1, v2) / min(v1, v2)
    bool constant_half = false;  // a half had zero variance; ratio guarded
};

SplitSummary split_summary_test(const TimeSeries& x);

enum class StationarityVerdict { stationary, nonstationary, inconclusive };

std::string_view to_string(StationarityVerdict verdict) noexcept;

struct StationarityThresholds {
    double max_mean_gap = 0.5;
    double max_variance_ratio = 2.0;
};

struct StationarityReport {
    double adf_statistic = 0.0;
    bool adf_reject_5pct = false;
    double split_mean_gap = 0.0;
    double split_variance_ratio = 1.0;
    bool split_constant_half = false;
    StationarityVerdict verdict = StationarityVerdict::inconclusive;
};

/// Combines the ADF decision with the split-half diagnostics: both agreeing
/// on stationarity gives `stationary`, both disagreeing gives
/// `nonstationary`, anything else is `inconclusive`.
StationarityReport stationarity_report(const TimeSeries& x, std::size_t adf_lag = 1,
                                       StationarityThresholds thresholds = {});

/// Additive decomposition x = trend + seasonal + residual. Trend and residual
/// are NaN in the first and last floor(period/2) positions, where the
/// centered moving average is undefined.
struct DecompositionResult {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> residual;
    std::vector<double> seasonal_indexes; // one per phase, summing to 0
    std::size_t period = 0;

    std::size_t interior_begin() const noexcept { return period / 2; }
    std::size_t interior_end() const noexcept { return trend.size() - period / 2; }
};

DecompositionResult decompose_additive(const TimeSeries& x, std::size_t period);

TimeSeries deseasonalize(const TimeSeries& x, std::size_t period);

/// s_1 = x_1, s_t = alpha*x_t + (1 - alpha)*s_{t-1}.
TimeSeries exp_smooth(const TimeSeries& x, double alpha);

/// (x - mean) / population sd.
TimeSeries standardize(const TimeSeries& x);

inline constexpr double kDefaultSmoothingAlpha = 0.2;

struct PipelineOptions {
    std::optional<std::size_t> deseasonalize_period;
    std::optional<double> smoothing_alpha;
    bool standardize = false;
};

/// Applies the enabled steps in the fixed order deseasonalize -> smooth ->
/// standardize.
TimeSeries preprocess_series(const TimeSeries& x, const PipelineOptions& options);

} // namespace ccmkit
