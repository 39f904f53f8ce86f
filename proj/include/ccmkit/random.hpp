#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ccmkit {

/// One Philox4x64-10 block: a keyed bijection on 256-bit counters.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) noexcept;

/// Counter-based random stream keyed by (seed, stream_id). Two streams built
/// from the same pair replay the same values; any task can build its own
/// stream without coordinating with others, which keeps parallel runs
/// identical to serial ones.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint64_t seed() const noexcept { return key_[0]; }
    std::uint64_t stream_id() const noexcept { return key_[1]; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal via Box-Muller.
    double normal() noexcept;
    /// Unbiased integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buffer_{};
    int used_ = 4;
};

/// Mixes a tuple of identifiers (pair id, library index, replicate, ...) into
/// a stream id.
std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> parts) noexcept;

/// `count` distinct indices from [0, population), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(RandomStream& rng, std::size_t population,
                                                    std::size_t count);

} // namespace ccmkit
