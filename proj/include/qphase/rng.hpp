#pragma once

#include <cstdint>
#include <limits>

namespace qphase {

/// Counter-based stream keyed by (seed, stream_id). Draw i is a pure
/// function of the key and i, so sequences are reproducible on any
/// platform. Branch randomness with split(); never share a stream between
/// workers.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t key() const { return key_; }
    std::uint64_t position() const { return counter_; }

    std::uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    result_type operator()() { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Child stream `index` of `master`. Depends only on the master's key, not
/// on how many draws the master has produced.
RngStream split(const RngStream& master, std::uint64_t index);

}  // namespace qphase
