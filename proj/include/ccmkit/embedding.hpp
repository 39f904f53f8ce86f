#pragma once

#include "ccmkit/dataset.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ccmkit {

struct EmbeddingConfig {
    int dim = 2;            // E
    int tau = 1;            // lag step between coordinates
    int tp = 1;             // forecast horizon (simplex forecasting only)
    int theiler_window = 0; // neighbors within this many steps of the query are excluded
    int neighbors = 0;      // 0 selects the simplex default E + 1

    int neighbor_count() const noexcept { return neighbors > 0 ? neighbors : dim + 1; }
    void validate() const;
};

/// Lagged-coordinate reconstruction of one series. Point k is
/// <X(t), X(t - tau), ..., X(t - (E-1)tau)> for t = 1 + (E-1)tau + k, using
/// 1-based source indexing.
class ShadowManifold {
public:
    ShadowManifold(const TimeSeries& series, const EmbeddingConfig& config);

    std::size_t size() const noexcept { return times_.size(); }
    int dim() const noexcept { return config_.dim; }
    std::span<const double> point(std::size_t k) const noexcept {
        return {coords_.data() + k * static_cast<std::size_t>(config_.dim), static_cast<std::size_t>(config_.dim)};
    }
    const std::vector<double>& coordinates() const noexcept { return coords_; }
    const std::vector<long>& times() const noexcept { return times_; }
    long time(std::size_t k) const noexcept { return times_[k]; }
    /// 0-based index into the source series for point k.
    std::size_t source_index(std::size_t k) const noexcept { return k + offset_; }
    /// Manifold position of a 1-based time; throws if absent.
    std::size_t position_of(long time) const;
    const std::string& source_name() const noexcept { return source_name_; }
    const EmbeddingConfig& config() const noexcept { return config_; }

private:
    std::vector<double> coords_;
    std::vector<long> times_;
    std::size_t offset_ = 0;
    std::string source_name_;
    EmbeddingConfig config_;
};

ShadowManifold embed(const TimeSeries& series, const EmbeddingConfig& config);

/// Squared Euclidean distance, summed in coordinate order. Every neighbor
/// search in the library goes through this one function so that exhaustive
/// and indexed searches agree bit for bit.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

struct NeighborSet {
    std::vector<std::size_t> indices; // manifold positions, nearest first
    std::vector<double> distances;    // Euclidean, nondecreasing
};

/// Exhaustive k-nearest search around the point at `query_time`, excluding
/// the query and every point within the Theiler window. Ties go to the
/// smaller time index.
NeighborSet neighbors(const ShadowManifold& manifold, long query_time, std::size_t k);

/// w_i = u_i / sum u_j with u_i = exp(-d_i / d_1). When d_1 = 0 the weight is
/// shared equally by the zero-distance entries.
std::vector<double> simplex_weights(std::span<const double> distances);

/// Same law without input checks, written into `out` (same length). For hot
/// loops whose distances come sorted from a neighbor search.
void simplex_weights_into(std::span<const double> distances, std::span<double> out) noexcept;

enum class ForecastMode { leave_one_out, train_test_split };

struct SimplexForecast {
    double rho = 0.0;
    bool degenerate = false;
    std::vector<long> times; // 1-based times of the forecast targets
    std::vector<double> observed;
    std::vector<double> predictions;
};

/// Simplex projection of X(t + tp) from the neighbors' futures. In
/// train/test mode the first half of the manifold is the library and the
/// second half is forecast.
SimplexForecast simplex_forecast(const TimeSeries& series, const EmbeddingConfig& config,
                                 ForecastMode mode = ForecastMode::leave_one_out);

struct SkillPoint {
    int dim = 0;
    double rho = 0.0;
    bool degenerate = false;
};

struct EmbeddingSelection {
    int best_dim = 0;
    std::vector<SkillPoint> curve;
    std::vector<std::string> warnings;
};

inline constexpr double kSkillTieTolerance = 1e-6;

/// Leave-one-out forecast skill for each feasible E in [e_min, e_max]; the
/// best E maximizes rho, with near-ties going to the smaller E.
EmbeddingSelection select_embedding(const TimeSeries& series, int e_min, int e_max, int tau = 1, int tp = 1,
                                    int theiler_window = 0);

} // namespace ccmkit
