#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace duality {

// Philox4x32-10 counter-based generator. The key is the seed, the upper counter words hold the
// stream id, so (seed, stream_id) pairs give independent reproducible streams.
class RngStream {
public:
    using result_type = std::uint32_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    double uniform();      // in (0, 1), 53 random bits
    double normal();       // standard normal, Box-Muller
    double exponential();  // rate 1

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    using Block = std::array<std::uint32_t, 4>;
    static Block philox(Block counter, std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    Block buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0;
};

// Stable 64-bit FNV-1a hash, used to derive stream ids from names.
std::uint64_t stream_hash(std::string_view name);

}  // namespace duality
