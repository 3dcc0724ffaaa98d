#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "silosim/backend.hpp"
#include "silosim/config.hpp"
#include "silosim/distance.hpp"
#include "silosim/errors.hpp"
#include "silosim/metrics.hpp"
#include "silosim/rng.hpp"
#include "silosim/trajectory.hpp"
#include "silosim/types.hpp"

namespace silosim {

/// What one agent receives this tick: its partner, whether the partner
/// mirrored, and the payload answer it will ingest (its own answer when
/// mirrored, the partner's otherwise).
struct InteractionPlanEntry {
    std::uint32_t partner = 0;
    bool mirrored = false;
    Answer payload;
};

using InteractionPlan = std::vector<InteractionPlanEntry>;

/// Plans every agent's interaction for one tick. For each agent, in
/// ascending index order, exactly two variates are drawn from that agent's
/// stream in fixed order: (1) a partner uniform over its k nearest
/// neighbors, (2) a Bernoulli(p) mirror flag. Both draws always happen, even
/// though the partner is unused when the flag comes up mirrored, so streams
/// stay aligned across p values sharing a seed.
inline InteractionPlan plan_interactions(std::span<const Answer> answers,
                                         const DistanceMatrix& D, double p, std::uint32_t k,
                                         std::span<RngStream> streams) {
    const std::size_t n = answers.size();
    if (streams.size() != n)
        throw Error("plan_interactions: need one stream per agent");
    InteractionPlan plan;
    plan.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto neighbors = k_nearest(D, i, k);
        const std::uint32_t pick = streams[i].next_below(k);
        const bool mirrored = streams[i].next_double() < p;
        InteractionPlanEntry entry;
        entry.partner = neighbors[pick];
        entry.mirrored = mirrored;
        entry.payload = mirrored ? answers[i] : answers[entry.partner];
        plan.push_back(std::move(entry));
    }
    return plan;
}

namespace detail {

inline SystemSnapshot make_snapshot(std::uint32_t t, std::vector<std::int32_t> labels,
                                    const std::vector<std::int32_t>* prev_labels) {
    SystemSnapshot snap;
    snap.t = t;
    SiloTally tally = silo_tally(labels);
    snap.silo_counts = std::move(tally.counts);
    snap.silo_count = snap.silo_counts.size();
    snap.unknown_count = tally.unknown;
    std::size_t known = 0;
    for (const auto& [id, c] : snap.silo_counts) known += c;
    snap.entropy = known > 0 ? entropy(snap.silo_counts, known) : 0.0;
    if (prev_labels != nullptr)
        snap.stability = stability(*prev_labels, labels);
    snap.labels = std::move(labels);
    return snap;
}

} // namespace detail

/// Advances one tick. Order within the tick:
///   (a) every agent answers from its current state (measurement);
///   (b) the distance matrix, silo tally, stability vs. tick t-1, and
///       entropy are computed and the snapshot emitted;
///   (c) for t >= 1, interactions are planned from the tick-t answers and
///       distances, and all updates are applied synchronously in ascending
///       agent index from the pre-update states.
/// Databases touched by tick t's update are therefore first observed by tick
/// t+1's measurement.
template <AgentBackendType B>
SystemSnapshot step_system(const SystemConfig& cfg, const B& backend,
                           std::vector<typename B::State>& states, std::uint32_t t,
                           const std::vector<std::int32_t>* prev_labels,
                           bool record_embeddings = false) {
    const std::uint32_t n = cfg.n;
    std::vector<Answer> answers;
    answers.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        RngStream rng(derive_seed(cfg.seed, {.role = StreamRole::Respond, .agent = i, .tick = t}));
        try {
            answers.push_back(backend.respond(states[i], rng));
        } catch (const std::exception& e) {
            throw Error("tick " + std::to_string(t) + ", agent " + std::to_string(i) +
                        ": " + e.what());
        }
        if (answers.back().embedding.size() != cfg.d)
            throw Error("tick " + std::to_string(t) + ", agent " + std::to_string(i) +
                        ": answer dimension " + std::to_string(answers.back().embedding.size()) +
                        " != configured d=" + std::to_string(cfg.d));
    }

    std::vector<std::int32_t> labels;
    labels.reserve(n);
    for (const auto& a : answers) labels.push_back(a.label.id);

    const DistanceMatrix D = DistanceMatrix::from_answers(answers);
    SystemSnapshot snap = detail::make_snapshot(t, std::move(labels), prev_labels);
    if (record_embeddings) {
        std::vector<Embedding> xs;
        xs.reserve(n);
        for (const auto& a : answers) xs.push_back(a.embedding);
        snap.embeddings = std::move(xs);
    }

    if (t >= 1) {
        std::vector<RngStream> streams;
        streams.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i)
            streams.emplace_back(
                derive_seed(cfg.seed, {.role = StreamRole::Interact, .agent = i, .tick = t}));
        const InteractionPlan plan = plan_interactions(answers, D, cfg.p, cfg.k, streams);
        for (std::uint32_t i = 0; i < n; ++i) {
            try {
                backend.update(states[i], plan[i].payload);
            } catch (const std::exception& e) {
                throw Error("tick " + std::to_string(t) + ", agent " + std::to_string(i) +
                            ": " + e.what());
            }
        }
    }
    return snap;
}

/// Runs one full system: initializes every agent from its init stream, then
/// iterates step_system for t = 0..T. The result is a pure function of the
/// configuration.
template <AgentBackendType B>
Trajectory run_system(const SystemConfig& cfg, const B& backend,
                      bool record_embeddings = false) {
    validate_config(cfg, /*min_T=*/0);
    std::vector<typename B::State> states;
    states.reserve(cfg.n);
    for (std::uint32_t i = 0; i < cfg.n; ++i) {
        RngStream rng(derive_seed(cfg.seed, {.role = StreamRole::AgentInit, .agent = i}));
        states.push_back(backend.initial_state(i, rng));
    }
    Trajectory traj;
    traj.config = cfg;
    traj.snapshots.reserve(cfg.T + 1);
    const std::vector<std::int32_t>* prev = nullptr;
    for (std::uint32_t t = 0; t <= cfg.T; ++t) {
        traj.snapshots.push_back(
            step_system(cfg, backend, states, t, prev, record_embeddings));
        prev = &traj.snapshots.back().labels;
    }
    return traj;
}

} // namespace silosim
