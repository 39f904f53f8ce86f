#pragma once

#include "ccmkit/dataset.hpp"
#include "ccmkit/embedding.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ccmkit {

struct CcmConfig {
    EmbeddingConfig embedding;          // tp is ignored: cross mapping estimates the same time step
    std::vector<std::size_t> lib_sizes; // empty selects default_lib_sizes
    std::size_t replicates = 100;
    double significance_level = 0.05;
    std::uint64_t rng_seed = 0;
    unsigned threads = 0; // 0 = hardware concurrency

    /// Checks the invariants against a target manifold of `usable` points.
    void validate(std::size_t usable) const;
    /// lib_sizes, or the defaults when empty.
    std::vector<std::size_t> resolved_lib_sizes(std::size_t usable) const;
};

/// Ten geometrically spaced sizes from max(E + 2, 10) to `usable`.
std::vector<std::size_t> default_lib_sizes(std::size_t usable, int dim);

struct CrossMapResult {
    double rho = 0.0;
    bool degenerate = false;
    std::vector<long> times; // 1-based times that could be estimated
    std::vector<double> observed;
    std::vector<double> estimates;
};

/// Estimates `source` from the shadow manifold of `target`, with neighbors
/// drawn only from the `library` positions of that manifold. Every manifold
/// point is a query; the query itself and its Theiler window are excluded.
CrossMapResult cross_map(const TimeSeries& source, const TimeSeries& target, const EmbeddingConfig& config,
                         std::span<const std::size_t> library);

struct CurvePoint {
    std::size_t lib_size = 0;
    double rho_mean = 0.0;
    double rho_sd = 0.0; // population sd over replicates
    std::vector<double> replicate_rho;
};

/// Does `source` causally influence `target`? Answered by cross mapping
/// source from target's manifold.
struct CcmResult {
    std::string source;
    std::string target;
    int dim = 0; // E of the target manifold
    std::vector<CurvePoint> curve;
    double p_value = 1.0;
    double rho_max_lib = 0.0;
    bool significant = false;
    bool degenerate = false; // a constant series; reported, never significant
};

/// Library subsets for (library index l, replicate r) come from the
/// substream derive_stream_id({manifold_key, l, r}), so results do not
/// depend on scheduling.
CcmResult ccm_curve(const TimeSeries& source, const TimeSeries& target, const CcmConfig& config,
                    std::uint64_t manifold_key = 0);

struct CausalEdge {
    std::string from;
    std::string to;
    double p_value = 1.0;
    double rho = 0.0;
    bool significant = false;
};

struct CausalGraph {
    std::vector<std::string> nodes;
    std::vector<CausalEdge> edges;
    std::vector<std::pair<std::string, std::string>> feedback_pairs;
};

/// Pairs {a, b} with both a -> b and b -> a significant, ordered by node
/// position.
std::vector<std::pair<std::string, std::string>> derive_feedback_pairs(const std::vector<std::string>& nodes,
                                                                      const std::vector<CausalEdge>& edges);

struct CcmScan {
    std::vector<CcmResult> results;
    CausalGraph graph;
};

/// Both directions of every requested pair: with a target, each other series
/// against it; otherwise all unordered pairs. `dims` overrides E per
/// manifold (keyed by series name).
CcmScan ccm_pairwise(const MultivariateDataset& dataset, const std::optional<std::string>& target,
                     const CcmConfig& config, const std::map<std::string, int>& dims = {});

struct ConvergenceDiagnostic {
    double kendall_tau = 0.0;
    double plateau_rho = 0.0;
};

ConvergenceDiagnostic convergence_diagnostic(const CcmResult& result);

} // namespace ccmkit
