#include "duality/rng.hpp"

#include <cmath>
#include <numbers>

namespace duality {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

RngStream::Block RngStream::philox(Block c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(m0) * c[0];
        const std::uint64_t p1 = std::uint64_t(m1) * c[2];
        const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += w0;
        k[1] += w1;
    }
    return c;
}

void RngStream::refill() {
    const Block ctr{std::uint32_t(counter_), std::uint32_t(counter_ >> 32), std::uint32_t(stream_),
                    std::uint32_t(stream_ >> 32)};
    buf_ = philox(ctr, {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
    ++counter_;
    pos_ = 0;
}

RngStream::result_type RngStream::operator()() {
    if (pos_ == 4) refill();
    return buf_[std::size_t(pos_++)];
}

double RngStream::uniform() {
    const std::uint64_t a = (*this)() >> 5, b = (*this)() >> 6;  // 27 + 26 bits
    return (double(a * 67108864u + b) + 0.5) / 9007199254740992.0;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
}

double RngStream::exponential() { return -std::log(uniform()); }

std::uint64_t stream_hash(std::string_view name) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace duality
