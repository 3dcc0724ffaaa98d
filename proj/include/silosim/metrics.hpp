#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>

#include "silosim/errors.hpp"
#include "silosim/types.hpp"

namespace silosim {

/// Occupancy of each non-empty silo. Unknown-sentinel labels are excluded
/// from the counts and from silo_count() but tracked in `unknown`.
struct SiloTally {
    std::map<std::int32_t, std::size_t> counts;
    std::size_t unknown = 0;

    std::size_t silo_count() const noexcept { return counts.size(); }
};

inline SiloTally silo_tally(std::span<const std::int32_t> labels) {
    SiloTally tally;
    for (std::int32_t id : labels) {
        if (id == SiloLabel::kUnknownId)
            ++tally.unknown;
        else
            ++tally.counts[id];
    }
    return tally;
}

/// Fraction of agents whose label is unchanged from the previous tick.
inline double stability(std::span<const std::int32_t> prev,
                        std::span<const std::int32_t> curr) {
    if (prev.size() != curr.size())
        throw Error("stability: label vectors differ in length");
    if (curr.empty())
        throw Error("stability: empty label vectors");
    std::size_t same = 0;
    for (std::size_t i = 0; i < curr.size(); ++i)
        if (prev[i] == curr[i]) ++same;
    return static_cast<double>(same) / static_cast<double>(curr.size());
}

/// Shannon entropy, in bits, of the distribution of agents over silos.
/// Empty silos never appear in the counts, so 0*log(0) never arises.
inline double entropy(const std::map<std::int32_t, std::size_t>& counts, std::size_t n) {
    if (n == 0)
        throw Error("entropy: zero population");
    std::size_t total = 0;
    for (const auto& [id, c] : counts) total += c;
    if (total != n)
        throw Error("entropy: counts sum to " + std::to_string(total) +
                    ", expected " + std::to_string(n));
    double e = 0.0;
    for (const auto& [id, c] : counts) {
        const double w = static_cast<double>(c) / static_cast<double>(n);
        e -= w * std::log2(w);
    }
    return e < 0.0 ? 0.0 : e; // clamp the single-silo -0.0 case
}

} // namespace silosim
