#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "silosim/backend.hpp"
#include "silosim/config.hpp"
#include "silosim/rng.hpp"
#include "silosim/types.hpp"

namespace silosim {

/// State of one synthetic retrieval agent: its FIFO database plus the
/// response policy and generation noise it answers with. The query vector is
/// shared by all agents of a run (it models the one fixed question) and is
/// used only by the nearest-to-query policy.
struct SyntheticAgentState {
    AgentDatabase database;
    ResponsePolicy policy = ResponsePolicy::MajorityCentroid;
    double sigma_gen = 0.0;
    Embedding query_vector;

    bool operator==(const SyntheticAgentState&) const = default;
};

/// Answer from the database under the state's policy.
///
/// majority-centroid: the most frequent label wins, ties broken toward the
/// label of the most recently inserted item among the tied labels; the
/// embedding is the centroid of that label's items plus N(0, sigma_gen^2 I).
///
/// nearest-to-query: the single item closest to the query vector wins, ties
/// toward the most recently inserted item; the embedding is that item's plus
/// the same noise.
inline Answer respond_synthetic(const SyntheticAgentState& state, RngStream& rng) {
    const auto& items = state.database.items();
    if (items.empty())
        throw Error("respond_synthetic: empty database");

    Answer ans;
    if (state.policy == ResponsePolicy::MajorityCentroid) {
        std::map<std::int32_t, std::size_t> counts;
        for (const auto& it : items) ++counts[it.label.id];
        std::size_t max_count = 0;
        for (const auto& [id, c] : counts) max_count = std::max(max_count, c);
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
            if (counts[it->label.id] == max_count) {
                ans.label = it->label;
                break;
            }
        }
        Embedding centroid(items.front().embedding.size(), 0.0);
        std::size_t members = 0;
        for (const auto& it : items) {
            if (it.label.id != ans.label.id) continue;
            for (std::size_t j = 0; j < centroid.size(); ++j)
                centroid[j] += it.embedding[j];
            ++members;
        }
        for (double& c : centroid) c /= static_cast<double>(members);
        ans.embedding = std::move(centroid);
    } else {
        const DatabaseItem* best = nullptr;
        double best_dist = 0.0;
        for (auto it = items.rbegin(); it != items.rend(); ++it) {
            const double dist = l2_distance(state.query_vector, it->embedding);
            if (best == nullptr || dist < best_dist) {
                best = &*it;
                best_dist = dist;
            }
        }
        ans.label = best->label;
        ans.embedding = best->embedding;
    }
    for (double& x : ans.embedding) x += state.sigma_gen * rng.next_gaussian();
    return ans;
}

/// Appends the payload as the newest database item, evicting the oldest if
/// the database is at capacity.
inline void update_synthetic(SyntheticAgentState& state, const Answer& payload) {
    if (state.database.empty())
        throw Error("update_synthetic: empty database");
    if (payload.embedding.size() != state.database.newest().embedding.size())
        throw Error("update_synthetic: payload dimension mismatch");
    DatabaseItem item;
    item.label = payload.label;
    item.embedding = payload.embedding;
    item.inserted_at = state.database.newest().inserted_at + 1;
    state.database.push(std::move(item));
}

/// Synthetic retrieval backend. Construction draws the label archetypes and
/// the shared query vector from the corpus stream; each agent's database is
/// then filled from its own init stream, so distinct agents get distinct
/// initializations and replicates are order-independent.
class SyntheticBackend {
public:
    using State = SyntheticAgentState;

    explicit SyntheticBackend(const SystemConfig& cfg)
        : params_(std::get<SyntheticParams>(cfg.backend)), d_(cfg.d), L_(cfg.L) {
        RngStream corpus(derive_seed(cfg.seed, {.role = StreamRole::Corpus}));
        archetypes_ = draw_archetypes(L_, d_, params_.rho, corpus);
        query_ = sphere_point(corpus, d_, params_.rho);
    }

    /// Capacity-many items: label from the configured distribution (uniform
    /// by default), embedding = archetype + N(0, sigma_init^2 I).
    State initial_state(std::uint32_t /*agent*/, RngStream& rng) const {
        State state{AgentDatabase(params_.capacity), params_.policy, params_.sigma_gen, query_};
        for (std::size_t c = 0; c < params_.capacity; ++c) {
            const std::uint32_t label = draw_label(rng);
            DatabaseItem item;
            item.label = SiloLabel{static_cast<std::int32_t>(label), {}};
            item.embedding = archetypes_.means[label];
            for (double& x : item.embedding) x += params_.sigma_init * rng.next_gaussian();
            item.inserted_at = static_cast<std::int64_t>(c);
            state.database.push(std::move(item));
        }
        return state;
    }

    Answer respond(const State& state, RngStream& rng) const {
        return respond_synthetic(state, rng);
    }

    void update(State& state, const Answer& payload) const {
        update_synthetic(state, payload);
    }

    const LabelArchetypes& archetypes() const noexcept { return archetypes_; }
    const Embedding& query_vector() const noexcept { return query_; }

private:
    std::uint32_t draw_label(RngStream& rng) const {
        if (params_.label_weights.empty())
            return rng.next_below(L_);
        double total = 0.0;
        for (double w : params_.label_weights) total += w;
        const double u = rng.next_double() * total;
        double cum = 0.0;
        for (std::uint32_t l = 0; l + 1 < L_; ++l) {
            cum += params_.label_weights[l];
            if (u < cum) return l;
        }
        return L_ - 1;
    }

    SyntheticParams params_;
    std::uint32_t d_;
    std::uint32_t L_;
    LabelArchetypes archetypes_;
    Embedding query_;
};

/// Corpus initialization as one call: the run's archetypes plus every
/// agent's starting state, all derived from the config seed.
inline std::pair<LabelArchetypes, std::vector<SyntheticAgentState>>
init_corpus(const SystemConfig& cfg) {
    SyntheticBackend backend(cfg);
    std::vector<SyntheticAgentState> states;
    states.reserve(cfg.n);
    for (std::uint32_t i = 0; i < cfg.n; ++i) {
        RngStream rng(derive_seed(cfg.seed, {.role = StreamRole::AgentInit, .agent = i}));
        states.push_back(backend.initial_state(i, rng));
    }
    return {backend.archetypes(), std::move(states)};
}

} // namespace silosim
