#pragma once

#include "ccmkit/dataset.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ccmkit {

inline constexpr int kSynthVariables = 8;
inline constexpr int kSynthMaxLag = 3;

/// How same-step references S_j(t) on the right-hand side are resolved.
enum class ContemporaneousMode {
    /// Use S_j(t) when j was already computed this step (j < k), else S_j(t-1);
    /// a variable's reference to itself always uses t-1.
    ordered_fallback,
    /// Every same-step reference uses t-1.
    all_lagged,
};

struct SynthConfig {
    std::size_t n_observations = 100000;
    double noise_sd = 0.1;
    /// Leading rows discarded, counting the 3 rows of initial history.
    std::size_t burn_in = 100;
    std::uint64_t rng_seed = 0;
    ContemporaneousMode mode = ContemporaneousMode::ordered_fallback;
    /// Fixed initial history (rows t = 0, 1, 2); drawn Normal(0, 1) otherwise.
    std::optional<std::array<std::array<double, kSynthVariables>, kSynthMaxLag>> initial_history;

    void validate() const;
};

/// One kernel term coef * exp(-S_var(t - lag)^2 / 2); `var` is 1-based.
struct SynthTerm {
    double coef;
    int var;
    int lag;
};

/// Right-hand side of variable k (1-based), without the noise term.
std::span<const SynthTerm> synth_terms(int k);

/// Sum of |coef| over variable k's terms: the bound on its noise-free part.
double synth_coefficient_bound(int k);

/// Series S1..S8 of length n_observations. Noise for variable k comes from
/// stream k of the seed; the random initial history from stream 0.
MultivariateDataset generate(const SynthConfig& config);

struct TruthEdge {
    std::string from;
    std::string to;
    std::vector<int> lags;
};

struct GroundTruthGraph {
    std::vector<std::string> nodes;
    std::vector<TruthEdge> edges; // includes self-dependencies, which scoring ignores
    std::vector<std::pair<std::string, std::string>> feedback_pairs;

    bool has_edge(const std::string& from, const std::string& to) const;
};

GroundTruthGraph ground_truth();

} // namespace ccmkit
