#pragma once

// Deterministic randomness for the whole simulator.
//
// Generator: SplitMix64 (Steele/Lea/Flood, "Fast splittable pseudorandom
// number generators"). Every stochastic site draws from its own stream,
// seeded via derive_seed(master, tag), so results never depend on the order
// in which agents, ticks, or replicates are evaluated. No wall-clock or OS
// entropy is used anywhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace silosim {

/// SplitMix64 finalizer; also used as the mixing round of derive_seed.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

/// A SplitMix64 stream. Cheap value type; copying forks the stream state.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_open() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, m). m must be positive.
    std::uint32_t next_below(std::uint32_t m) noexcept {
        auto v = static_cast<std::uint32_t>(next_double() * static_cast<double>(m));
        return v < m ? v : m - 1;
    }

    /// Standard normal via Box-Muller (cosine branch; two uniforms per draw).
    double next_gaussian() noexcept {
        const double u1 = next_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool operator==(const RngStream&) const = default;

private:
    std::uint64_t state_;
};

/// Where a stream is consumed. Values are part of the determinism contract
/// and must never be renumbered.
enum class StreamRole : std::uint8_t {
    Run = 1,       ///< per-(p,k,replicate) run seed derivation in the sweep harness
    Corpus = 2,    ///< label archetypes and the shared query vector
    AgentInit = 3, ///< one agent's initial state
    Respond = 4,   ///< one agent's answer generation at one tick
    Interact = 5,  ///< one agent's partner/mirror draws at one tick
};

/// Structured key naming one random stream. Optional fields are encoded with
/// presence flags; p is carried as its configured decimal text, never as
/// floating-point bits.
struct StreamTag {
    StreamRole role;
    std::optional<std::string> p_text;
    std::optional<std::uint32_t> k;
    std::optional<std::uint32_t> replicate;
    std::optional<std::uint32_t> agent;
    std::optional<std::uint32_t> tick;
};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_opt_u32(std::vector<std::uint8_t>& buf, const std::optional<std::uint32_t>& v) {
    buf.push_back(v.has_value() ? 1 : 0);
    put_u32(buf, v.value_or(0));
}

} // namespace detail

/// Pure function master seed x tag -> stream seed. The tag is serialized to a
/// canonical byte string (fixed field order: p, k, replicate, role, agent,
/// tick) and absorbed 8 bytes at a time through the SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t master, const StreamTag& tag) {
    std::vector<std::uint8_t> buf;
    buf.push_back(tag.p_text.has_value() ? 1 : 0);
    detail::put_u32(buf, tag.p_text ? static_cast<std::uint32_t>(tag.p_text->size()) : 0);
    if (tag.p_text)
        buf.insert(buf.end(), tag.p_text->begin(), tag.p_text->end());
    detail::put_opt_u32(buf, tag.k);
    detail::put_opt_u32(buf, tag.replicate);
    buf.push_back(static_cast<std::uint8_t>(tag.role));
    detail::put_opt_u32(buf, tag.agent);
    detail::put_opt_u32(buf, tag.tick);

    std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
    for (std::size_t off = 0; off < buf.size(); off += 8) {
        std::uint64_t block = 0;
        const std::size_t len = std::min<std::size_t>(8, buf.size() - off);
        for (std::size_t i = 0; i < len; ++i)
            block |= static_cast<std::uint64_t>(buf[off + i]) << (8 * i);
        h = mix64(h ^ block);
    }
    return mix64(h ^ static_cast<std::uint64_t>(buf.size()));
}

} // namespace silosim
