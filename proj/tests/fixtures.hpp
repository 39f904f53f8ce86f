#pragma once

// Deterministic series shared by the unit and acceptance tests.

#include "ccmkit/dataset.hpp"
#include "ccmkit/random.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

inline std::vector<double> logistic_map(std::size_t n, double x0 = 0.4, double r = 3.8) {
    std::vector<double> x(n);
    x[0] = x0;
    for (std::size_t t = 1; t < n; ++t) x[t] = r * x[t - 1] * (1.0 - x[t - 1]);
    return x;
}

/// X autonomous, X drives Y:
///   X' = X(3.8 - 3.8X),  Y' = Y(3.8 - 3.8Y - 0.32X).
/// Initial values are drawn in [0.2, 0.8) from the seed; a short transient
/// is discarded.
struct CoupledPair {
    ccmkit::TimeSeries x;
    ccmkit::TimeSeries y;
};

inline CoupledPair coupled_logistic(std::size_t n, std::uint64_t seed, double coupling = 0.32) {
    ccmkit::RandomStream rng(seed, 0xC0);
    double x = 0.2 + 0.6 * rng.uniform();
    double y = 0.2 + 0.6 * rng.uniform();
    constexpr std::size_t transient = 50;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t t = 0; t < n + transient; ++t) {
        if (t >= transient) {
            xs.push_back(x);
            ys.push_back(y);
        }
        const double nx = x * (3.8 - 3.8 * x);
        const double ny = y * (3.8 - 3.8 * y - coupling * x);
        x = nx;
        y = ny;
    }
    return {ccmkit::TimeSeries::from_values("X", std::move(xs)), ccmkit::TimeSeries::from_values("Y", std::move(ys))};
}

inline std::vector<double> periodic(std::size_t n, double period = 10.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t + 1) / period);
    return x;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, std::uint64_t stream = 1) {
    ccmkit::RandomStream rng(seed, stream);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, std::uint64_t stream = 1) {
    auto x = white_noise(n, seed, stream);
    for (std::size_t t = 1; t < n; ++t) x[t] += x[t - 1];
    return x;
}

inline ccmkit::TimeSeries series(std::string name, std::vector<double> values) {
    return ccmkit::TimeSeries::from_values(std::move(name), std::move(values));
}

} // namespace fixtures
