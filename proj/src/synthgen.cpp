#include "ccmkit/synthgen.hpp"

#include "ccmkit/error.hpp"
#include "ccmkit/random.hpp"

#include <algorithm>
#include <cmath>

namespace ccmkit {

namespace {

const double kRoot2 = std::sqrt(2.0);

const std::array<std::vector<SynthTerm>, kSynthVariables> kTerms = {{
    {{0.125 * kRoot2, 1, 1}, {0.3 * kRoot2, 1, 0}, {0.2, 5, 3}, {0.2, 6, 0}},
    {{1.2, 1, 1}, {0.2, 1, 2}, {0.2, 5, 2}, {0.2, 3, 1}},
    {{-1.05, 1, 1}, {0.2, 3, 0}, {0.2, 2, 2}, {0.2, 6, 2}},
    {{-1.15, 1, 1}, {0.2 * kRoot2, 4, 1}, {1.35, 3, 1}},
    {{-1.15, 1, 3}, {0.2 * kRoot2, 2, 2}, {1.35, 3, 1}},
    {{-1.05, 1, 1}, {0.2, 3, 0}, {0.2, 2, 2}, {0.2, 7, 0}},
    {{-1.05, 4, 2}, {0.2, 7, 0}, {0.2, 5, 3}, {0.2, 6, 0}},
    {{-1.05, 7, 2}, {0.2, 8, 0}, {0.2, 6, 1}, {0.2, 2, 3}},
}};

inline double kernel(double s) noexcept { return std::exp(-0.5 * s * s); }

std::string node_name(int k) { return "S" + std::to_string(k); }

} // namespace

void SynthConfig::validate() const {
    if (n_observations < 10) fail(ErrorCode::invalid_argument, "synth: n must be at least 10");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        fail(ErrorCode::invalid_argument, "synth: noise sd must be a nonnegative number");
    }
    if (burn_in < static_cast<std::size_t>(kSynthMaxLag)) {
        fail(ErrorCode::invalid_argument, "synth: burn-in must be at least the maximum lag 3");
    }
}

std::span<const SynthTerm> synth_terms(int k) {
    if (k < 1 || k > kSynthVariables) fail(ErrorCode::invalid_argument, "synth_terms: variable out of range");
    return kTerms[static_cast<std::size_t>(k - 1)];
}

double synth_coefficient_bound(int k) {
    double total = 0.0;
    for (const auto& term : synth_terms(k)) total += std::fabs(term.coef);
    return total;
}

MultivariateDataset generate(const SynthConfig& config) {
    config.validate();
    const std::size_t total = config.burn_in + config.n_observations;
    constexpr auto nv = static_cast<std::size_t>(kSynthVariables);
    // Row-major state, s[t * nv + (k - 1)].
    std::vector<double> s(total * nv, 0.0);

    if (config.initial_history) {
        for (std::size_t t = 0; t < kSynthMaxLag; ++t) {
            for (std::size_t k = 0; k < nv; ++k) s[t * nv + k] = (*config.initial_history)[t][k];
        }
    } else {
        RandomStream init(config.rng_seed, 0);
        for (std::size_t i = 0; i < kSynthMaxLag * nv; ++i) s[i] = init.normal();
    }

    std::vector<RandomStream> noise;
    noise.reserve(nv);
    for (std::size_t k = 1; k <= nv; ++k) noise.emplace_back(config.rng_seed, k);

    for (std::size_t t = kSynthMaxLag; t < total; ++t) {
        for (int k = 1; k <= kSynthVariables; ++k) {
            double value = 0.0;
            for (const auto& term : kTerms[static_cast<std::size_t>(k - 1)]) {
                std::size_t lag = static_cast<std::size_t>(term.lag);
                if (lag == 0) {
                    const bool current = config.mode == ContemporaneousMode::ordered_fallback && term.var < k;
                    lag = current ? 0 : 1;
                }
                value += term.coef * kernel(s[(t - lag) * nv + static_cast<std::size_t>(term.var - 1)]);
            }
            const double eps = noise[static_cast<std::size_t>(k - 1)].normal();
            s[t * nv + static_cast<std::size_t>(k - 1)] = value + config.noise_sd * eps;
        }
    }

    std::vector<std::string> names;
    std::vector<std::vector<double>> columns(nv);
    for (std::size_t k = 0; k < nv; ++k) {
        names.push_back(node_name(static_cast<int>(k + 1)));
        columns[k].reserve(config.n_observations);
        for (std::size_t t = config.burn_in; t < total; ++t) columns[k].push_back(s[t * nv + k]);
    }
    return MultivariateDataset::from_columns(std::move(names), std::move(columns), "synth");
}

bool GroundTruthGraph::has_edge(const std::string& from, const std::string& to) const {
    return std::any_of(edges.begin(), edges.end(), [&](const TruthEdge& e) { return e.from == from && e.to == to; });
}

GroundTruthGraph ground_truth() {
    // Parents of each variable with lags, as read off the equations. S1's
    // self-dependency is listed at lags 1 and 2.
    const std::vector<std::vector<std::pair<int, std::vector<int>>>> parents = {
        {{1, {1, 2}}, {5, {3}}, {6, {0}}},
        {{1, {1, 2}}, {5, {2}}, {3, {1}}},
        {{1, {1}}, {3, {0}}, {2, {2}}, {6, {2}}},
        {{1, {1}}, {4, {1}}, {3, {1}}},
        {{1, {3}}, {2, {2}}, {3, {1}}},
        {{1, {1}}, {3, {0}}, {2, {2}}, {7, {0}}},
        {{4, {2}}, {7, {0}}, {5, {3}}, {6, {0}}},
        {{7, {2}}, {8, {0}}, {6, {1}}, {2, {3}}},
    };
    GroundTruthGraph g;
    for (int k = 1; k <= kSynthVariables; ++k) g.nodes.push_back(node_name(k));
    for (int k = 1; k <= kSynthVariables; ++k) {
        for (const auto& [from, lags] : parents[static_cast<std::size_t>(k - 1)]) {
            g.edges.push_back({node_name(from), node_name(k), lags});
        }
    }
    for (int a = 1; a <= kSynthVariables; ++a) {
        for (int b = a + 1; b <= kSynthVariables; ++b) {
            if (g.has_edge(node_name(a), node_name(b)) && g.has_edge(node_name(b), node_name(a))) {
                g.feedback_pairs.emplace_back(node_name(a), node_name(b));
            }
        }
    }
    return g;
}

} // namespace ccmkit
