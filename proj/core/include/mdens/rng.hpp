#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mdens {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// Maps a 128-bit counter and a 64-bit key to 128 random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream identified by (seed, stream_id).
///
/// The seed is the Philox key; the stream id occupies the upper half of the
/// counter and the draw index the lower half, so distinct stream ids never
/// share a block. Copies are independent and replay the same sequence.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
    /// Number of 64-bit words consumed so far.
    [[nodiscard]] std::uint64_t position() const noexcept { return position_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    /// Standard normal by inversion of the normal CDF.
    double normal() noexcept;

    // UniformRandomBitGenerator interface.
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t position_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
};

/// Inverse of the standard normal CDF (Wichura's AS241, ~1e-16 relative accuracy).
double normal_quantile(double p);

}  // namespace mdens
