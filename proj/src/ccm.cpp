#include "ccmkit/ccm.hpp"

#include "ccmkit/error.hpp"
#include "ccmkit/neighbor_index.hpp"
#include "ccmkit/numerics.hpp"
#include "ccmkit/parallel.hpp"
#include "ccmkit/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace ccmkit {

void CcmConfig::validate(std::size_t usable) const {
    embedding.validate();
    if (replicates < 2) fail(ErrorCode::invalid_argument, "ccm: replicates must be at least 2");
    if (!(significance_level > 0.0 && significance_level < 1.0)) {
        fail(ErrorCode::invalid_argument, "ccm: significance level must lie in (0, 1)");
    }
    const auto sizes = resolved_lib_sizes(usable);
    const auto min_lib = static_cast<std::size_t>(embedding.dim + 2);
    if (sizes.front() < min_lib) {
        fail(ErrorCode::infeasible_config, "ccm: smallest library " + std::to_string(sizes.front()) +
                                               " is below E + 2 = " + std::to_string(min_lib));
    }
    if (sizes.back() > usable) {
        fail(ErrorCode::infeasible_config, "ccm: largest library " + std::to_string(sizes.back()) +
                                               " exceeds the " + std::to_string(usable) + " manifold points");
    }
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (sizes[i] <= sizes[i - 1]) fail(ErrorCode::invalid_argument, "ccm: library sizes must be strictly increasing");
    }
}

std::vector<std::size_t> CcmConfig::resolved_lib_sizes(std::size_t usable) const {
    if (!lib_sizes.empty()) return lib_sizes;
    return default_lib_sizes(usable, embedding.dim);
}

std::vector<std::size_t> default_lib_sizes(std::size_t usable, int dim) {
    const std::size_t lo = std::max<std::size_t>(static_cast<std::size_t>(dim) + 2, 10);
    if (usable < lo) {
        fail(ErrorCode::infeasible_config, "ccm: only " + std::to_string(usable) + " manifold points, need " +
                                               std::to_string(lo) + " for the default library sizes");
    }
    constexpr int count = 10;
    std::vector<std::size_t> out;
    const double ratio = std::log(static_cast<double>(usable) / static_cast<double>(lo));
    for (int i = 0; i < count; ++i) {
        const double v = static_cast<double>(lo) * std::exp(ratio * i / (count - 1));
        auto s = static_cast<std::size_t>(std::llround(v));
        s = std::clamp(s, lo, usable);
        if (out.empty() || s > out.back()) out.push_back(s);
    }
    out.back() = usable;
    return out;
}

namespace {

/// Neighbor tables of one library draw: for each estimable manifold
/// position, k positions and simplex weights.
struct CrossMapTable {
    std::vector<std::size_t> queries;
    std::vector<std::size_t> neighbors; // queries.size() * k
    std::vector<double> weights;
};

// `search(q, nn, d2)` fills up to k neighbors of manifold position q and
// returns how many it found.
template <class Search>
CrossMapTable fill_table(const ShadowManifold& manifold, Search&& search) {
    const auto k = static_cast<std::size_t>(manifold.config().neighbor_count());
    CrossMapTable table;
    table.queries.reserve(manifold.size());
    table.neighbors.reserve(manifold.size() * k);
    table.weights.reserve(manifold.size() * k);
    std::vector<std::size_t> nn(k);
    std::vector<double> d2(k);
    std::vector<double> dist(k);
    std::vector<double> w(k);
    for (std::size_t q = 0; q < manifold.size(); ++q) {
        if (search(q, nn, d2) < k) continue;
        for (std::size_t i = 0; i < k; ++i) dist[i] = std::sqrt(d2[i]);
        simplex_weights_into(dist, w);
        table.queries.push_back(q);
        table.neighbors.insert(table.neighbors.end(), nn.begin(), nn.end());
        table.weights.insert(table.weights.end(), w.begin(), w.end());
    }
    return table;
}

CrossMapTable build_table(const ShadowManifold& manifold, std::span<const std::size_t> library) {
    const auto k = static_cast<std::size_t>(manifold.config().neighbor_count());
    const auto window = static_cast<std::size_t>(manifold.config().theiler_window);
    const NeighborIndex index(manifold, library);
    return fill_table(manifold, [&](std::size_t q, std::vector<std::size_t>& nn, std::vector<double>& d2) {
        return index.query(q, k, window, nn, d2);
    });
}

CrossMapTable build_table(const ShadowManifold& manifold, const NeighborCache& cache,
                          std::span<const std::size_t> library) {
    const auto k = static_cast<std::size_t>(manifold.config().neighbor_count());
    std::vector<char> member(manifold.size(), 0);
    for (std::size_t p : library) member[p] = 1;
    return fill_table(manifold, [&](std::size_t q, std::vector<std::size_t>& nn, std::vector<double>& d2) {
        return cache.query(q, k, member, library, nn, d2);
    });
}

// Neighbor lists cost depth * n positions of memory and n^2 distances to
// build; past this size the kd-tree is used for every library.
constexpr std::size_t kCacheMaxPoints = 20000;
constexpr std::size_t kCacheDepth = 1024;

void apply_table(const CrossMapTable& table, const ShadowManifold& manifold, const std::vector<double>& source,
                 std::vector<double>& observed, std::vector<double>& estimates) {
    const auto k = static_cast<std::size_t>(manifold.config().neighbor_count());
    observed.resize(table.queries.size());
    estimates.resize(table.queries.size());
    for (std::size_t j = 0; j < table.queries.size(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            acc += table.weights[j * k + i] * source[manifold.source_index(table.neighbors[j * k + i])];
        }
        observed[j] = source[manifold.source_index(table.queries[j])];
        estimates[j] = acc;
    }
}

double table_rho(const CrossMapTable& table, const ShadowManifold& manifold, const std::vector<double>& source,
                 std::vector<double>& observed, std::vector<double>& estimates) {
    if (table.queries.size() < 2) return 0.0;
    apply_table(table, manifold, source, observed, estimates);
    return pearson(observed, estimates).rho;
}

void check_aligned(const TimeSeries& a, const TimeSeries& b) {
    if (a.length() != b.length()) {
        fail(ErrorCode::length_mismatch, "ccm: series '" + a.name + "' and '" + b.name + "' differ in length");
    }
}

/// Every source sharing one target manifold reuses the same library draws
/// and neighbor tables; only the weighted sums differ.
std::vector<CcmResult> run_manifold(const TimeSeries& target, const std::vector<const TimeSeries*>& sources,
                                    const CcmConfig& config, std::uint64_t manifold_key) {
    for (const auto* s : sources) check_aligned(*s, target);
    EmbeddingConfig emb = config.embedding;
    emb.tp = 0;
    const ShadowManifold manifold(target, emb);
    const std::size_t usable = manifold.size();
    config.validate(usable);
    const auto sizes = config.resolved_lib_sizes(usable);
    const std::size_t reps = config.replicates;
    const std::size_t libs = sizes.size();

    const bool target_constant = is_constant(target.values);
    std::vector<CcmResult> results(sources.size());
    std::vector<std::size_t> live; // sources whose cross map is computed
    for (std::size_t s = 0; s < sources.size(); ++s) {
        results[s].source = sources[s]->name;
        results[s].target = target.name;
        results[s].dim = emb.dim;
        results[s].degenerate = target_constant || is_constant(sources[s]->values);
        if (!results[s].degenerate) live.push_back(s);
    }

    // rho[(s * libs + l) * reps + r]
    std::vector<double> rho(sources.size() * libs * reps, 0.0);
    // The full library is the same set in every replicate, so it is
    // computed once and copied.
    std::vector<std::size_t> tasks;
    for (std::size_t l = 0; l < libs; ++l) {
        for (std::size_t r = 0; r < reps; ++r) {
            if (sizes[l] == usable && r > 0) continue;
            tasks.push_back(l * reps + r);
        }
    }
    // Large libraries in high dimension make kd-tree searches close to
    // exhaustive; they are served from per-point neighbor lists instead.
    const auto k = static_cast<std::size_t>(emb.neighbor_count());
    std::optional<NeighborCache> cache;
    std::size_t cache_from = usable + 1;
    if (!live.empty() && usable <= kCacheMaxPoints) {
        const std::size_t depth = std::min(kCacheDepth, usable);
        const std::size_t threshold = (2 * k * usable + depth - 1) / depth;
        if (sizes.back() >= threshold) {
            cache.emplace(manifold, static_cast<std::size_t>(emb.theiler_window), depth);
            cache_from = cache->min_library(k);
        }
    }
    if (!live.empty()) {
        parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
            const std::size_t l = tasks[t] / reps;
            const std::size_t r = tasks[t] % reps;
            std::vector<std::size_t> library;
            if (sizes[l] == usable) {
                library.resize(usable);
                std::iota(library.begin(), library.end(), std::size_t{0});
            } else {
                RandomStream rng(config.rng_seed, derive_stream_id({manifold_key, l, r}));
                library = sample_without_replacement(rng, usable, sizes[l]);
            }
            const auto table = sizes[l] >= cache_from ? build_table(manifold, *cache, library)
                                                      : build_table(manifold, library);
            std::vector<double> observed;
            std::vector<double> estimates;
            for (std::size_t s : live) {
                rho[(s * libs + l) * reps + r] = table_rho(table, manifold, sources[s]->values, observed, estimates);
            }
        });
    }

    for (std::size_t s = 0; s < sources.size(); ++s) {
        auto& res = results[s];
        res.curve.resize(libs);
        for (std::size_t l = 0; l < libs; ++l) {
            double* row = rho.data() + (s * libs + l) * reps;
            if (sizes[l] == usable) std::fill(row + 1, row + reps, row[0]);
            auto& point = res.curve[l];
            point.lib_size = sizes[l];
            point.replicate_rho.assign(row, row + reps);
            const auto stats = summary(point.replicate_rho);
            point.rho_mean = stats.mean;
            point.rho_sd = std::sqrt(stats.variance);
        }
        res.rho_max_lib = res.curve.back().rho_mean;
        if (res.degenerate) {
            res.p_value = 1.0;
            res.significant = false;
            continue;
        }
        std::size_t not_converging = 0;
        const auto& lo = res.curve.front().replicate_rho;
        const auto& hi = res.curve.back().replicate_rho;
        for (std::size_t r = 0; r < reps; ++r) {
            if (lo[r] >= hi[r]) ++not_converging;
        }
        res.p_value = static_cast<double>(not_converging) / static_cast<double>(reps);
        res.significant = res.p_value < config.significance_level && res.rho_max_lib > 0.0;
    }
    return results;
}

} // namespace

CrossMapResult cross_map(const TimeSeries& source, const TimeSeries& target, const EmbeddingConfig& config,
                         std::span<const std::size_t> library) {
    check_aligned(source, target);
    EmbeddingConfig emb = config;
    emb.tp = 0;
    const ShadowManifold manifold(target, emb);
    if (library.size() < static_cast<std::size_t>(emb.dim + 2)) {
        fail(ErrorCode::infeasible_config, "cross_map: library of " + std::to_string(library.size()) +
                                               " points is below E + 2 = " + std::to_string(emb.dim + 2));
    }
    const auto table = build_table(manifold, library);
    CrossMapResult out;
    apply_table(table, manifold, source.values, out.observed, out.estimates);
    out.times.reserve(table.queries.size());
    for (std::size_t q : table.queries) out.times.push_back(manifold.time(q));
    if (out.estimates.size() < 2) {
        out.degenerate = true;
        return out;
    }
    const auto c = pearson(out.observed, out.estimates);
    out.rho = c.rho;
    out.degenerate = c.degenerate;
    return out;
}

CcmResult ccm_curve(const TimeSeries& source, const TimeSeries& target, const CcmConfig& config,
                    std::uint64_t manifold_key) {
    return run_manifold(target, {&source}, config, manifold_key).front();
}

std::vector<std::pair<std::string, std::string>> derive_feedback_pairs(const std::vector<std::string>& nodes,
                                                                      const std::vector<CausalEdge>& edges) {
    auto index_of = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), name) - nodes.begin());
    };
    std::vector<std::pair<std::size_t, std::size_t>> found;
    for (const auto& e : edges) {
        if (!e.significant || e.from == e.to) continue;
        const bool reverse = std::any_of(edges.begin(), edges.end(), [&](const CausalEdge& o) {
            return o.significant && o.from == e.to && o.to == e.from;
        });
        if (!reverse) continue;
        auto a = index_of(e.from);
        auto b = index_of(e.to);
        if (a > b) std::swap(a, b);
        found.emplace_back(a, b);
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    std::vector<std::pair<std::string, std::string>> out;
    for (auto [a, b] : found) out.emplace_back(nodes[a], nodes[b]);
    return out;
}

CcmScan ccm_pairwise(const MultivariateDataset& dataset, const std::optional<std::string>& target,
                     const CcmConfig& config, const std::map<std::string, int>& dims) {
    const auto& series = dataset.series();
    if (series.size() < 2) fail(ErrorCode::insufficient_data, "ccm_pairwise: need at least 2 series");
    const std::size_t n = series.size();

    // Ordered list of (source, target) directions in report order.
    std::vector<std::pair<std::size_t, std::size_t>> directions;
    if (target) {
        const std::size_t t = dataset.column_index(*target);
        for (std::size_t s = 0; s < n; ++s) {
            if (s == t) continue;
            directions.emplace_back(s, t);
            directions.emplace_back(t, s);
        }
    } else {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                directions.emplace_back(a, b);
                directions.emplace_back(b, a);
            }
        }
    }

    std::vector<CcmResult> by_direction(directions.size());
    for (std::size_t m = 0; m < n; ++m) {
        std::vector<const TimeSeries*> sources;
        std::vector<std::size_t> slots;
        for (std::size_t d = 0; d < directions.size(); ++d) {
            if (directions[d].second != m) continue;
            sources.push_back(&series[directions[d].first]);
            slots.push_back(d);
        }
        if (sources.empty()) continue;
        CcmConfig cfg = config;
        if (auto it = dims.find(series[m].name); it != dims.end()) cfg.embedding.dim = it->second;
        auto results = run_manifold(series[m], sources, cfg, m);
        for (std::size_t i = 0; i < slots.size(); ++i) by_direction[slots[i]] = std::move(results[i]);
    }

    CcmScan scan;
    scan.graph.nodes = dataset.names();
    for (auto& r : by_direction) {
        scan.graph.edges.push_back({r.source, r.target, r.p_value, r.rho_max_lib, r.significant});
        scan.results.push_back(std::move(r));
    }
    scan.graph.feedback_pairs = derive_feedback_pairs(scan.graph.nodes, scan.graph.edges);
    return scan;
}

ConvergenceDiagnostic convergence_diagnostic(const CcmResult& result) {
    if (result.curve.size() < 3) {
        fail(ErrorCode::insufficient_data, "convergence_diagnostic: need at least 3 library sizes");
    }
    std::vector<double> lib;
    std::vector<double> mean;
    for (const auto& p : result.curve) {
        lib.push_back(static_cast<double>(p.lib_size));
        mean.push_back(p.rho_mean);
    }
    return {kendall_tau(lib, mean), mean.back()};
}

} // namespace ccmkit
