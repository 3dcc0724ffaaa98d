#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "silosim/errors.hpp"
#include "silosim/rng.hpp"
#include "silosim/types.hpp"

namespace silosim {

/// Behavioral contract every agent implementation satisfies. The engine is
/// written against this concept only, so backends are interchangeable.
///
///  - initial_state builds agent `i`'s starting state from its init stream;
///  - respond produces an Answer without mutating the state;
///  - update ingests a payload Answer deterministically.
template <typename B>
concept AgentBackendType = requires(const B& b, const typename B::State& cs,
                                    typename B::State& s, RngStream& rng, const Answer& a) {
    typename B::State;
    { b.initial_state(std::uint32_t{}, rng) } -> std::same_as<typename B::State>;
    { b.respond(cs, rng) } -> std::same_as<Answer>;
    { b.update(s, a) } -> std::same_as<void>;
};

/// One fixed embedding per label: the semantic location of that label in
/// embedding space. Stands in for the distinct flower-species semantics a
/// real embedding model would capture.
struct LabelArchetypes {
    std::vector<Embedding> means; ///< L vectors, each of norm `separation`
    double separation = 1.0;
};

/// Vector of d iid standard normals.
inline Embedding gaussian_vector(RngStream& rng, std::size_t d) {
    Embedding v(d);
    for (auto& x : v) x = rng.next_gaussian();
    return v;
}

/// A point drawn uniformly on the sphere of radius rho.
inline Embedding sphere_point(RngStream& rng, std::size_t d, double rho) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Embedding v = gaussian_vector(rng, d);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (double& x : v) x *= rho / norm;
        return v;
    }
    throw Error("sphere_point: degenerate draw");
}

/// Draws L distinct archetypes uniformly on the rho-sphere. With d = 1 the
/// sphere has only two points, so more than two labels cannot be made
/// distinct and the draw fails.
inline LabelArchetypes draw_archetypes(std::uint32_t L, std::uint32_t d, double rho,
                                       RngStream& rng) {
    LabelArchetypes arch;
    arch.separation = rho;
    arch.means.reserve(L);
    for (std::uint32_t l = 0; l < L; ++l) {
        bool placed = false;
        for (int attempt = 0; attempt < 256 && !placed; ++attempt) {
            Embedding cand = sphere_point(rng, d, rho);
            placed = true;
            for (const auto& m : arch.means)
                if (m == cand) { placed = false; break; }
            if (placed) arch.means.push_back(std::move(cand));
        }
        if (!placed)
            throw ConfigError("cannot draw " + std::to_string(L) +
                              " distinct archetypes in dimension " + std::to_string(d));
    }
    return arch;
}

} // namespace silosim
