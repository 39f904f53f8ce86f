#include "ccmkit/embedding.hpp"
#include "ccmkit/error.hpp"
#include "ccmkit/neighbor_index.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ccmkit;
using fixtures::series;

namespace {

// Exhaustive oracle: every eligible point, sorted by (distance, position).
std::vector<std::size_t> brute_force(const ShadowManifold& m, std::size_t q, std::size_t k, std::size_t window,
                                     const std::vector<std::size_t>& library) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t p : library) {
        if ((p > q ? p - q : q - p) <= window) continue;
        double d2 = 0.0;
        for (int j = 0; j < m.dim(); ++j) {
            const double d = m.point(q)[static_cast<std::size_t>(j)] - m.point(p)[static_cast<std::size_t>(j)];
            d2 += d * d;
        }
        all.emplace_back(d2, p);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
    return out;
}

EmbeddingConfig cfg(int e, int tau = 1, int tp = 1, int theiler = 0) {
    EmbeddingConfig c;
    c.dim = e;
    c.tau = tau;
    c.tp = tp;
    c.theiler_window = theiler;
    return c;
}

} // namespace

TEST_SUITE("embedding") {

TEST_CASE("manifold coordinates and times") {
    const auto m = embed(series("x", {1, 2, 3, 4, 5}), cfg(2));
    REQUIRE(m.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(m.time(k) == static_cast<long>(k + 2));
        CHECK(m.point(k)[0] == static_cast<double>(k + 2));
        CHECK(m.point(k)[1] == static_cast<double>(k + 1));
    }
    const auto one = embed(series("x", {4, 5, 6}), cfg(1));
    CHECK(one.size() == 3);
    CHECK(one.point(2)[0] == 6.0);
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    const auto m4 = embed(series("x", v), cfg(4, 2));
    CHECK(m4.size() == 94);
    CHECK(m4.time(0) == 7);
    CHECK(m4.point(0)[3] == 1.0);
    CHECK_THROWS_AS(embed(series("x", {1, 2, 3}), cfg(3)), Error);
    CHECK_THROWS_AS(embed(series("x", v), cfg(0)), Error);
    CHECK_THROWS_AS(embed(series("x", v), cfg(2, 0)), Error);
}

TEST_CASE("point count formula") {
    for (std::size_t len : {10, 37, 100}) {
        for (int e = 1; e <= 5; ++e) {
            for (int tau = 1; tau <= 3; ++tau) {
                if (len < static_cast<std::size_t>((e - 1) * tau + 2)) continue;
                const auto m = embed(series("x", fixtures::white_noise(len, 1)), cfg(e, tau));
                CHECK(m.size() == len - static_cast<std::size_t>((e - 1) * tau));
            }
        }
    }
}

TEST_CASE("neighbors of collinear points") {
    const auto m = embed(series("x", {0, 1, 3}), cfg(1));
    const auto nn = neighbors(m, 2, 2);
    CHECK(nn.indices == std::vector<std::size_t>{0, 2});
    CHECK(nn.distances[0] == 1.0);
    CHECK(nn.distances[1] == 2.0);
    CHECK_THROWS_AS(neighbors(m, 2, 3), Error);
    CHECK_THROWS_AS(neighbors(m, 9, 1), Error);
    // Equal distances go to the earlier time.
    const auto tie = embed(series("x", {1, 0, 1, 2}), cfg(1));
    CHECK(neighbors(tie, 2, 1).indices[0] == 0); // query time 2 (value 0): positions 0 and 2 both at distance 1
}

TEST_CASE("neighbor search matches the exhaustive oracle") {
    RandomStream rng(77, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const int e = 1 + static_cast<int>(rng.below(6));
        const int window = static_cast<int>(rng.below(4));
        // Coarse rounding plants many exact ties.
        auto v = fixtures::white_noise(500, 300 + static_cast<std::uint64_t>(trial));
        if (trial % 2 == 0) {
            for (auto& x : v) x = std::round(x * 2.0) / 2.0;
        }
        const auto m = embed(series("x", v), cfg(e, 1 + static_cast<int>(rng.below(3)), 1, window));
        std::vector<std::size_t> all(m.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        std::vector<std::size_t> library = trial % 3 == 0 ? sample_without_replacement(rng, m.size(), m.size() / 3) : all;
        const NeighborIndex index(m, library);
        const std::size_t k = static_cast<std::size_t>(e + 1);
        std::vector<std::size_t> got(k);
        std::vector<double> d2(k);
        for (std::size_t q = 0; q < m.size(); q += 7) {
            const auto expected = brute_force(m, q, k, static_cast<std::size_t>(window), library);
            const std::size_t found = index.query(q, k, static_cast<std::size_t>(window), got, d2);
            REQUIRE(found == expected.size());
            CHECK(std::equal(expected.begin(), expected.end(), got.begin()));
            if (library.size() == m.size()) CHECK(neighbors(m, m.time(q), k).indices == expected);
        }
    }
}

TEST_CASE("cached neighbor lists match the exhaustive oracle") {
    RandomStream rng(78, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const int e = 1 + static_cast<int>(rng.below(8));
        const int window = static_cast<int>(rng.below(4));
        auto v = fixtures::white_noise(400, 600 + static_cast<std::uint64_t>(trial));
        if (trial % 2 == 0) {
            for (auto& x : v) x = std::round(x * 2.0) / 2.0;
        }
        const auto m = embed(series("x", v), cfg(e, 1, 1, window));
        // Shallow lists force the library-scan fallback on some queries.
        const std::size_t depth = trial % 3 == 0 ? 8 : 64;
        const NeighborCache cache(m, static_cast<std::size_t>(window), depth);
        const std::size_t size = 5 + rng.below(m.size() - 5);
        const auto library = sample_without_replacement(rng, m.size(), size);
        std::vector<char> member(m.size(), 0);
        for (std::size_t p : library) member[p] = 1;
        const std::size_t k = static_cast<std::size_t>(e + 1);
        std::vector<std::size_t> got(k);
        std::vector<double> d2(k);
        for (std::size_t q = 0; q < m.size(); q += 3) {
            const auto expected = brute_force(m, q, k, static_cast<std::size_t>(window), library);
            const std::size_t found = cache.query(q, k, member, library, got, d2);
            REQUIRE(found == expected.size());
            CHECK(std::equal(expected.begin(), expected.end(), got.begin()));
        }
    }
}

TEST_CASE("simplex weights") {
    const auto w = simplex_weights(std::vector<double>{1, 2, 3});
    CHECK(w[0] == doctest::Approx(0.66524).epsilon(1e-5));
    CHECK(w[1] == doctest::Approx(0.24473).epsilon(1e-5));
    CHECK(w[2] == doctest::Approx(0.09003).epsilon(1e-5));
    const auto e = simplex_weights(std::vector<double>{2, 2, 2, 2});
    for (double x : e) CHECK(x == doctest::Approx(0.25));
    CHECK(simplex_weights(std::vector<double>{0, 0, 5}) == std::vector<double>{0.5, 0.5, 0.0});
    CHECK_THROWS_AS(simplex_weights(std::vector<double>{2, 1}), Error);
    CHECK_THROWS_AS(simplex_weights(std::vector<double>{-1, 1}), Error);
    CHECK_THROWS_AS(simplex_weights(std::vector<double>{}), Error);
}

TEST_CASE("simplex forecasts") {
    const auto periodic = series("p", fixtures::periodic(200));
    CHECK(simplex_forecast(periodic, cfg(2)).rho >= 0.999);
    const auto noise = series("n", fixtures::white_noise(500, 21));
    CHECK(simplex_forecast(noise, cfg(2)).rho < 0.3);
    const auto logistic = series("l", fixtures::logistic_map(1000));
    CHECK(simplex_forecast(logistic, cfg(2)).rho >= 0.95);
    const auto split = simplex_forecast(logistic, cfg(2), ForecastMode::train_test_split);
    CHECK(split.rho >= 0.95);
    CHECK(split.predictions.size() == (1000 - 1 - 1) - (1000 - 1 - 1) / 2);
    CHECK_THROWS_AS(simplex_forecast(series("s", {1, 2, 3}), cfg(2)), Error);
}

TEST_CASE("forecast skill is affine invariant") {
    auto v = fixtures::logistic_map(600, 0.3);
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = -20.0 + 4.0 * v[i];
    for (int e = 1; e <= 4; ++e) {
        CHECK(std::fabs(simplex_forecast(series("x", v), cfg(e)).rho - simplex_forecast(series("y", a), cfg(e)).rho) <
              1e-9);
    }
}

TEST_CASE("wider exclusion does not raise skill on periodic data") {
    const auto p = series("p", fixtures::periodic(200));
    double prev = simplex_forecast(p, cfg(2)).rho;
    for (int w = 1; w <= 8; ++w) {
        const double rho = simplex_forecast(p, cfg(2, 1, 1, w)).rho;
        CHECK(rho <= prev + 1e-6);
        prev = rho;
    }
}

TEST_CASE("embedding selection") {
    const auto pair = fixtures::coupled_logistic(1000, 1);
    const auto sel = select_embedding(pair.y, 1, 8);
    CHECK((sel.best_dim == 2 || sel.best_dim == 3));
    CHECK(sel.curve.size() == 8);
    for (const auto& p : sel.curve) {
        if (p.dim == sel.best_dim) CHECK(p.rho >= 0.95);
    }
    const auto per = select_embedding(series("p", fixtures::periodic(200)), 1, 8);
    for (const auto& p : per.curve) {
        if (p.dim == per.best_dim) CHECK(p.rho >= 0.999);
    }
    CHECK_THROWS_AS(select_embedding(series("s", {1, 2, 3, 4}), 3, 8), Error);
    CHECK_THROWS_AS(select_embedding(series("s", {1, 2, 3, 4}), 3, 2), Error);

    const auto deg = select_embedding(series("flat", std::vector<double>(300, 1.0)), 1, 3);
    CHECK(deg.best_dim == 1);
    CHECK(deg.curve.front().degenerate);
    CHECK_FALSE(deg.warnings.empty());
}

TEST_CASE("ties resolve to the smaller E") {
    // Periodic data forecasts perfectly for every E >= 2.
    const auto sel = select_embedding(series("p", fixtures::periodic(200)), 1, 6);
    CHECK(sel.best_dim == 2);
}

} // TEST_SUITE
