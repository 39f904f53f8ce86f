#include "ccmkit/embedding.hpp"

#include "ccmkit/error.hpp"
#include "ccmkit/neighbor_index.hpp"
#include "ccmkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ccmkit {

void EmbeddingConfig::validate() const {
    if (dim < 1) fail(ErrorCode::invalid_argument, "embedding: E must be at least 1");
    if (tau < 1) fail(ErrorCode::invalid_argument, "embedding: tau must be at least 1");
    if (tp < 0) fail(ErrorCode::invalid_argument, "embedding: tp must be nonnegative");
    if (theiler_window < 0) fail(ErrorCode::invalid_argument, "embedding: Theiler window must be nonnegative");
    if (neighbors < 0) fail(ErrorCode::invalid_argument, "embedding: neighbor count must be positive");
}

ShadowManifold::ShadowManifold(const TimeSeries& series, const EmbeddingConfig& config)
    : source_name_(series.name), config_(config) {
    config.validate();
    const std::size_t span = static_cast<std::size_t>(config.dim - 1) * static_cast<std::size_t>(config.tau);
    const std::size_t length = series.length();
    if (length < span + 2) {
        fail(ErrorCode::insufficient_data, "embed: series '" + series.name + "' of length " + std::to_string(length) +
                                               " is too short for E=" + std::to_string(config.dim) +
                                               ", tau=" + std::to_string(config.tau));
    }
    offset_ = span;
    const std::size_t count = length - span;
    const auto e = static_cast<std::size_t>(config.dim);
    const auto tau = static_cast<std::size_t>(config.tau);
    coords_.resize(count * e);
    times_.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t t = k + span;
        times_[k] = static_cast<long>(t + 1);
        for (std::size_t j = 0; j < e; ++j) coords_[k * e + j] = series.values[t - j * tau];
    }
}

std::size_t ShadowManifold::position_of(long time) const {
    const long first = static_cast<long>(offset_) + 1;
    if (time < first || time > times_.back()) {
        fail(ErrorCode::invalid_argument, "manifold '" + source_name_ + "' has no point at time " + std::to_string(time));
    }
    return static_cast<std::size_t>(time - first);
}

ShadowManifold embed(const TimeSeries& series, const EmbeddingConfig& config) {
    return ShadowManifold(series, config);
}

NeighborSet neighbors(const ShadowManifold& manifold, long query_time, std::size_t k) {
    const std::size_t q = manifold.position_of(query_time);
    const auto window = static_cast<std::size_t>(manifold.config().theiler_window);
    struct Candidate {
        double d2;
        std::size_t pos;
    };
    std::vector<Candidate> pool;
    pool.reserve(manifold.size());
    const auto qp = manifold.point(q);
    for (std::size_t p = 0; p < manifold.size(); ++p) {
        const std::size_t gap = p > q ? p - q : q - p;
        if (gap <= window) continue;
        pool.push_back({squared_distance(qp, manifold.point(p)), p});
    }
    if (pool.size() < k) {
        fail(ErrorCode::insufficient_data, "neighbors: only " + std::to_string(pool.size()) +
                                               " eligible points for k=" + std::to_string(k));
    }
    auto order = [](const Candidate& a, const Candidate& b) {
        return a.d2 < b.d2 || (a.d2 == b.d2 && a.pos < b.pos);
    };
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(), order);
    NeighborSet out;
    out.indices.reserve(k);
    out.distances.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.indices.push_back(pool[i].pos);
        out.distances.push_back(std::sqrt(pool[i].d2));
    }
    return out;
}

std::vector<double> simplex_weights(std::span<const double> distances) {
    if (distances.empty()) fail(ErrorCode::invalid_argument, "simplex_weights: no distances");
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (!(distances[i] >= 0.0) || !std::isfinite(distances[i])) {
            fail(ErrorCode::invalid_argument, "simplex_weights: distances must be finite and nonnegative");
        }
        if (i > 0 && distances[i] < distances[i - 1]) {
            fail(ErrorCode::invalid_argument, "simplex_weights: distances must be sorted nondecreasing");
        }
    }
    std::vector<double> w(distances.size());
    simplex_weights_into(distances, w);
    return w;
}

void simplex_weights_into(std::span<const double> distances, std::span<double> w) noexcept {
    const double nearest = distances.front();
    if (nearest == 0.0) {
        std::size_t zeros = 0;
        while (zeros < distances.size() && distances[zeros] == 0.0) ++zeros;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = i < zeros ? 1.0 / static_cast<double>(zeros) : 0.0;
        return;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(-distances[i] / nearest);
        total += w[i];
    }
    for (auto& v : w) v /= total;
}

SimplexForecast simplex_forecast(const TimeSeries& series, const EmbeddingConfig& config, ForecastMode mode) {
    const ShadowManifold manifold(series, config);
    const auto horizon = static_cast<std::size_t>(config.tp);
    if (manifold.size() <= horizon + 1) {
        fail(ErrorCode::insufficient_data, "simplex_forecast: series '" + series.name + "' too short for tp");
    }
    // Points whose future X(t + tp) is observed.
    const std::size_t with_future = manifold.size() - horizon;
    std::vector<std::size_t> library;
    std::vector<std::size_t> targets;
    if (mode == ForecastMode::leave_one_out) {
        library.resize(with_future);
        std::iota(library.begin(), library.end(), std::size_t{0});
        targets = library;
    } else {
        const std::size_t split = with_future / 2;
        library.resize(split);
        std::iota(library.begin(), library.end(), std::size_t{0});
        targets.resize(with_future - split);
        std::iota(targets.begin(), targets.end(), split);
    }

    const auto k = static_cast<std::size_t>(config.neighbor_count());
    const auto window = static_cast<std::size_t>(config.theiler_window);
    const NeighborIndex index(manifold, library);
    std::vector<std::size_t> nn(k);
    std::vector<double> d2(k);
    std::vector<double> dist(k);
    std::vector<double> w(k);

    SimplexForecast out;
    out.times.reserve(targets.size());
    out.observed.reserve(targets.size());
    out.predictions.reserve(targets.size());
    for (std::size_t q : targets) {
        if (index.query(q, k, window, nn, d2) < k) continue;
        for (std::size_t i = 0; i < k; ++i) dist[i] = std::sqrt(d2[i]);
        simplex_weights_into(dist, w);
        double estimate = 0.0;
        for (std::size_t i = 0; i < k; ++i) estimate += w[i] * series.values[manifold.source_index(nn[i]) + horizon];
        const std::size_t target_index = manifold.source_index(q) + horizon;
        out.times.push_back(static_cast<long>(target_index + 1));
        out.observed.push_back(series.values[target_index]);
        out.predictions.push_back(estimate);
    }
    if (out.predictions.size() < 2) {
        fail(ErrorCode::insufficient_data, "simplex_forecast: too few points after exclusions for series '" +
                                               series.name + "'");
    }
    const auto c = pearson(out.observed, out.predictions);
    out.rho = c.rho;
    out.degenerate = c.degenerate;
    return out;
}

EmbeddingSelection select_embedding(const TimeSeries& series, int e_min, int e_max, int tau, int tp,
                                    int theiler_window) {
    if (e_min < 1 || e_max < e_min) fail(ErrorCode::invalid_argument, "select_embedding: invalid E range");
    EmbeddingSelection out;
    for (int e = e_min; e <= e_max; ++e) {
        EmbeddingConfig cfg;
        cfg.dim = e;
        cfg.tau = tau;
        cfg.tp = tp;
        cfg.theiler_window = theiler_window;
        // Feasible when every forecast can still find E+1 neighbors outside
        // its exclusion zone.
        const long span = static_cast<long>(e - 1) * tau;
        const long usable = static_cast<long>(series.length()) - span - tp;
        if (usable < cfg.neighbor_count() + 2L * theiler_window + 2) continue;
        const auto fc = simplex_forecast(series, cfg, ForecastMode::leave_one_out);
        out.curve.push_back({e, fc.rho, fc.degenerate});
    }
    if (out.curve.empty()) {
        fail(ErrorCode::infeasible_config, "select_embedding: no E in [" + std::to_string(e_min) + ", " +
                                               std::to_string(e_max) + "] fits series '" + series.name + "'");
    }
    const SkillPoint* best = &out.curve.front();
    for (const auto& p : out.curve) {
        if (p.rho > best->rho + kSkillTieTolerance) best = &p;
    }
    out.best_dim = best->dim;
    const auto degenerate = std::count_if(out.curve.begin(), out.curve.end(), [](const SkillPoint& p) { return p.degenerate; });
    if (degenerate > 0) {
        out.warnings.push_back("degenerate forecast correlation for " + std::to_string(degenerate) + " of " +
                               std::to_string(out.curve.size()) + " embedding dimensions in series '" +
                               series.name + "'");
    }
    if (best->degenerate) {
        out.warnings.push_back("selected E=" + std::to_string(best->dim) + " has degenerate forecast skill");
    }
    return out;
}

} // namespace ccmkit
