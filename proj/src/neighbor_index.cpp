#include "ccmkit/neighbor_index.hpp"

#include "ccmkit/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ccmkit {

namespace {

constexpr std::uint32_t kLeafSize = 12;

inline bool precedes(double d2a, std::size_t pa, double d2b, std::size_t pb) noexcept {
    return d2a < d2b || (d2a == d2b && pa < pb);
}

} // namespace

NeighborIndex::NeighborIndex(const ShadowManifold& manifold, std::span<const std::size_t> library)
    : manifold_(&manifold), dim_(static_cast<std::size_t>(manifold.dim())), positions_(library.begin(), library.end()) {
    for (std::size_t p : positions_) {
        if (p >= manifold.size()) fail(ErrorCode::invalid_argument, "NeighborIndex: library position out of range");
    }
    if (positions_.size() >= std::numeric_limits<std::uint32_t>::max()) {
        fail(ErrorCode::invalid_argument, "NeighborIndex: library too large");
    }
    points_.resize(positions_.size() * dim_);
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        const auto pt = manifold.point(positions_[i]);
        std::copy(pt.begin(), pt.end(), points_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
    }
    if (!positions_.empty()) {
        nodes_.reserve(2 * positions_.size() / kLeafSize + 2);
        build(0, static_cast<std::uint32_t>(positions_.size()));
    }
}

std::int32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, -1, -1, 0, 0.0});
    if (end - begin <= kLeafSize) return id;

    int split_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t i = begin; i < end; ++i) {
            const double v = points_[i * dim_ + d];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            split_dim = static_cast<int>(d);
        }
    }
    if (best_spread <= 0.0) return id; // all points coincide; keep as one leaf

    // Partition an index permutation, then apply it to both arrays.
    std::vector<std::uint32_t> order(end - begin);
    std::iota(order.begin(), order.end(), begin);
    const std::uint32_t mid = begin + (end - begin) / 2;
    const auto sd = static_cast<std::size_t>(split_dim);
    std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return points_[a * dim_ + sd] < points_[b * dim_ + sd]; });
    std::vector<double> pts(order.size() * dim_);
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::copy_n(points_.begin() + static_cast<std::ptrdiff_t>(order[i] * dim_), dim_,
                    pts.begin() + static_cast<std::ptrdiff_t>(i * dim_));
        pos[i] = positions_[order[i]];
    }
    std::copy(pts.begin(), pts.end(), points_.begin() + static_cast<std::ptrdiff_t>(begin * dim_));
    std::copy(pos.begin(), pos.end(), positions_.begin() + begin);

    const double split_value = points_[mid * dim_ + sd];
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.left = left;
    node.right = right;
    node.split_dim = split_dim;
    node.split_value = split_value;
    return id;
}

std::size_t NeighborIndex::query(std::size_t query_pos, std::size_t k, std::size_t exclusion_radius,
                                 std::span<std::size_t> out_positions, std::span<double> out_squared_distances) const {
    if (out_positions.size() < k || out_squared_distances.size() < k) {
        fail(ErrorCode::invalid_argument, "NeighborIndex::query: output buffers smaller than k");
    }
    if (k == 0 || nodes_.empty()) return 0;
    const auto q = manifold_->point(query_pos);
    std::size_t count = 0;

    auto offer = [&](double d2, std::size_t pos) {
        if (count == k && !precedes(d2, pos, out_squared_distances[k - 1], out_positions[k - 1])) return;
        std::size_t slot = count < k ? count++ : k - 1;
        while (slot > 0 && precedes(d2, pos, out_squared_distances[slot - 1], out_positions[slot - 1])) {
            out_squared_distances[slot] = out_squared_distances[slot - 1];
            out_positions[slot] = out_positions[slot - 1];
            --slot;
        }
        out_squared_distances[slot] = d2;
        out_positions[slot] = pos;
    };

    // Explicit stack of (node, squared distance to its splitting plane).
    struct Pending {
        std::int32_t node;
        double bound;
    };
    std::vector<Pending> stack;
    stack.reserve(64);
    stack.push_back({0, 0.0});
    while (!stack.empty()) {
        const Pending item = stack.back();
        stack.pop_back();
        // Points behind a plane are at least `bound` away; equality must still
        // be visited because ties resolve by position.
        if (count == k && item.bound > out_squared_distances[k - 1]) continue;
        const Node& node = nodes_[static_cast<std::size_t>(item.node)];
        if (node.left < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::size_t pos = positions_[i];
                const std::size_t gap = pos > query_pos ? pos - query_pos : query_pos - pos;
                if (gap <= exclusion_radius) continue;
                offer(squared_distance(q, {points_.data() + i * dim_, dim_}), pos);
            }
            continue;
        }
        const double diff = q[static_cast<std::size_t>(node.split_dim)] - node.split_value;
        const std::int32_t near = diff < 0.0 ? node.left : node.right;
        const std::int32_t far = diff < 0.0 ? node.right : node.left;
        stack.push_back({far, diff * diff});
        stack.push_back({near, 0.0});
    }
    return count;
}

} // namespace ccmkit

namespace ccmkit {

namespace {

constexpr std::uint32_t kNoEntry = std::numeric_limits<std::uint32_t>::max();

// Inserts (d2, pos) into the sorted top-k buffers holding `count` entries.
inline void offer_sorted(double d2, std::size_t pos, std::size_t k, std::size_t& count, std::span<std::size_t> positions,
                         std::span<double> distances) noexcept {
    if (count == k && !precedes(d2, pos, distances[k - 1], positions[k - 1])) return;
    std::size_t i = count < k ? count++ : k - 1;
    while (i > 0 && precedes(d2, pos, distances[i - 1], positions[i - 1])) {
        distances[i] = distances[i - 1];
        positions[i] = positions[i - 1];
        --i;
    }
    distances[i] = d2;
    positions[i] = pos;
}

} // namespace

std::size_t scan_neighbors(const ShadowManifold& manifold, std::size_t query_pos, std::size_t k,
                           std::size_t exclusion_radius, std::span<const std::size_t> library,
                           std::span<std::size_t> out_positions, std::span<double> out_squared_distances) {
    if (k == 0) return 0;
    const auto q = manifold.point(query_pos);
    std::size_t count = 0;
    for (std::size_t p : library) {
        if ((p > query_pos ? p - query_pos : query_pos - p) <= exclusion_radius) continue;
        offer_sorted(squared_distance(q, manifold.point(p)), p, k, count, out_positions, out_squared_distances);
    }
    return count;
}

NeighborCache::NeighborCache(const ShadowManifold& manifold, std::size_t exclusion_radius, std::size_t depth)
    : manifold_(&manifold), radius_(exclusion_radius) {
    const std::size_t n = manifold.size();
    if (n >= kNoEntry) fail(ErrorCode::invalid_argument, "NeighborCache: manifold too large");
    depth_ = std::min(depth, n);
    lists_.assign(n * depth_, kNoEntry);
    struct Entry {
        double d2;
        std::uint32_t pos;
    };
    auto order = [](const Entry& a, const Entry& b) { return precedes(a.d2, a.pos, b.d2, b.pos); };
    std::vector<Entry> pool;
    pool.reserve(n);
    for (std::size_t q = 0; q < n; ++q) {
        pool.clear();
        const auto qp = manifold.point(q);
        for (std::size_t p = 0; p < n; ++p) {
            if ((p > q ? p - q : q - p) <= radius_) continue;
            pool.push_back({squared_distance(qp, manifold.point(p)), static_cast<std::uint32_t>(p)});
        }
        const std::size_t keep = std::min(depth_, pool.size());
        const auto mid = pool.begin() + static_cast<std::ptrdiff_t>(keep);
        if (keep < pool.size()) std::nth_element(pool.begin(), mid, pool.end(), order);
        std::sort(pool.begin(), mid, order);
        for (std::size_t i = 0; i < keep; ++i) lists_[q * depth_ + i] = pool[i].pos;
    }
}

std::size_t NeighborCache::min_library(std::size_t k) const noexcept {
    // A random library of size L holds about L/n of each list; ask for twice
    // the expected walk so exhausted lists stay rare.
    const std::size_t n = manifold_->size();
    if (depth_ == 0) return n + 1;
    return (2 * k * n + depth_ - 1) / depth_;
}

std::size_t NeighborCache::query(std::size_t query_pos, std::size_t k, std::span<const char> member,
                                 std::span<const std::size_t> library, std::span<std::size_t> out_positions,
                                 std::span<double> out_squared_distances) const {
    if (out_positions.size() < k || out_squared_distances.size() < k) {
        fail(ErrorCode::invalid_argument, "NeighborCache::query: output buffers smaller than k");
    }
    if (k == 0) return 0;
    const auto q = manifold_->point(query_pos);
    const std::uint32_t* list = lists_.data() + query_pos * depth_;
    std::size_t count = 0;
    for (std::size_t i = 0; i < depth_ && count < k; ++i) {
        const std::uint32_t p = list[i];
        if (p == kNoEntry) break; // every eligible point has been seen
        if (!member[p]) continue;
        out_positions[count] = p;
        out_squared_distances[count] = squared_distance(q, manifold_->point(p));
        ++count;
    }
    if (count == k || (depth_ > 0 && list[depth_ - 1] == kNoEntry)) return count;
    return scan_neighbors(*manifold_, query_pos, k, radius_, library, out_positions, out_squared_distances);
}

} // namespace ccmkit
