#pragma once

#include "ccmkit/embedding.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ccmkit {

/// kd-tree over a subset (the library) of a manifold's points. Queries
/// return exactly what an exhaustive scan ordered by (squared distance,
/// position) returns.
class NeighborIndex {
public:
    NeighborIndex(const ShadowManifold& manifold, std::span<const std::size_t> library);

    std::size_t size() const noexcept { return positions_.size(); }

    /// k nearest library points to manifold point `query_pos`, skipping
    /// positions p with |p - query_pos| <= exclusion_radius (so the query
    /// itself is always skipped). Fills `out_positions` and
    /// `out_squared_distances` nearest first and returns how many were found,
    /// which is less than k only when too few points are eligible.
    std::size_t query(std::size_t query_pos, std::size_t k, std::size_t exclusion_radius,
                      std::span<std::size_t> out_positions, std::span<double> out_squared_distances) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int split_dim = 0;
        double split_value = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);

    const ShadowManifold* manifold_;
    std::size_t dim_;
    std::vector<std::size_t> positions_; // tree order
    std::vector<double> points_;         // tree order, row-major
    std::vector<Node> nodes_;
};

/// Nearest-neighbor lists of every manifold point, for many searches over
/// random library subsets of one manifold. Each point keeps its `depth`
/// nearest eligible points in (squared distance, position) order. A search
/// walks that list and keeps library members; if the list runs out first it
/// scans the library instead, so results always equal the exhaustive scan.
class NeighborCache {
public:
    NeighborCache(const ShadowManifold& manifold, std::size_t exclusion_radius, std::size_t depth);

    std::size_t depth() const noexcept { return depth_; }

    /// Library sizes at or above this are expected to be served from the
    /// lists for k neighbors; smaller libraries are cheaper to scan.
    std::size_t min_library(std::size_t k) const noexcept;

    /// Same contract as NeighborIndex::query with the cache's exclusion
    /// radius. `member[p]` is nonzero exactly for the positions in `library`.
    std::size_t query(std::size_t query_pos, std::size_t k, std::span<const char> member,
                      std::span<const std::size_t> library, std::span<std::size_t> out_positions,
                      std::span<double> out_squared_distances) const;

private:
    const ShadowManifold* manifold_;
    std::size_t radius_;
    std::size_t depth_;
    std::vector<std::uint32_t> lists_; // size() * depth_, unused tail padded with the sentinel
};

/// Exhaustive k-nearest scan over `library`, ordered by (squared distance,
/// position), skipping positions within `exclusion_radius` of the query.
std::size_t scan_neighbors(const ShadowManifold& manifold, std::size_t query_pos, std::size_t k,
                           std::size_t exclusion_radius, std::span<const std::size_t> library,
                           std::span<std::size_t> out_positions, std::span<double> out_squared_distances);

} // namespace ccmkit
