#pragma once

#include "ccmkit/ccm.hpp"
#include "ccmkit/dataset.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ccmkit {

struct GrangerLag {
    int lag = 0;
    double f_statistic = 0.0;
    double p_value = 1.0;
    bool singular = false; // rank-deficient design; reported with F = 0, p = 1
    std::size_t observations = 0;
};

struct GrangerResult {
    std::string cause;
    std::string effect;
    std::vector<GrangerLag> per_lag; // sorted by lag
    std::vector<int> significant_at;
    double min_p_value = 1.0;
    int best_lag = 0; // lag attaining min_p_value (smallest on ties)
    bool significant = false;
    bool degenerate = false; // every lag singular
};

inline constexpr double kGrangerThreshold = 0.05;

/// Nested OLS per lag p = 1..max_lag on the N - p usable rows:
/// effect_t ~ const + effect lags, versus the same plus cause lags.
GrangerResult granger_test(const TimeSeries& cause, const TimeSeries& effect, int max_lag,
                           double threshold = kGrangerThreshold);

struct GrangerScan {
    std::vector<GrangerResult> results; // ordered pairs, dataset order
    CausalGraph graph;
    int max_lag = 0;
    double significant_fraction = 0.0;
    // Chance that at least one of max_lag independent tests at `threshold`
    // rejects; the min-p summary inflates false positives toward this.
    double null_base_rate = 0.0;
    std::string note;
};

GrangerScan granger_pairwise(const MultivariateDataset& dataset, int max_lag, double threshold = kGrangerThreshold,
                             unsigned threads = 0);

} // namespace ccmkit
