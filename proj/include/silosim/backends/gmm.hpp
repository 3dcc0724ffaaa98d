#pragma once

#include <cstdint>
#include <vector>

#include "silosim/backend.hpp"
#include "silosim/config.hpp"
#include "silosim/rng.hpp"
#include "silosim/types.hpp"

namespace silosim {

/// One agent as a Gaussian mixture: a pseudo-count and a mean per component.
/// The component index doubles as the silo label id.
struct GmmAgentState {
    std::vector<double> alpha;    ///< pseudo-counts, sum must stay positive
    std::vector<Embedding> means; ///< one mean per component
    double sigma = 0.0;
    double eta = 0.1;
    double decay = 0.0;

    bool operator==(const GmmAgentState&) const = default;
};

/// Samples component c with probability alpha_c / sum(alpha); the answer is
/// (label c, mu_c + N(0, sigma^2 I)).
inline Answer respond_gmm(const GmmAgentState& state, RngStream& rng) {
    double total = 0.0;
    for (double a : state.alpha) total += a;
    if (!(total > 0.0))
        throw Error("respond_gmm: all-zero pseudo-counts");
    const double u = rng.next_double() * total;
    std::size_t comp = state.alpha.size() - 1;
    double cum = 0.0;
    for (std::size_t c = 0; c + 1 < state.alpha.size(); ++c) {
        cum += state.alpha[c];
        if (u < cum) { comp = c; break; }
    }
    Answer ans;
    ans.label = SiloLabel{static_cast<std::int32_t>(comp), {}};
    ans.embedding = state.means[comp];
    for (double& x : ans.embedding) x += state.sigma * rng.next_gaussian();
    return ans;
}

/// alpha_l += 1 and mu_l moves a step eta toward the payload embedding;
/// other components are untouched. With decay configured, all pseudo-counts
/// shrink multiplicatively before the increment.
inline void update_gmm(GmmAgentState& state, const Answer& payload) {
    const auto id = payload.label.id;
    if (id < 0 || static_cast<std::size_t>(id) >= state.alpha.size())
        throw Error("update_gmm: label id " + std::to_string(id) + " out of range");
    if (payload.embedding.size() != state.means[id].size())
        throw Error("update_gmm: payload dimension mismatch");
    if (state.decay > 0.0)
        for (double& a : state.alpha) a *= 1.0 - state.decay;
    state.alpha[id] += 1.0;
    auto& mean = state.means[id];
    for (std::size_t j = 0; j < mean.size(); ++j)
        mean[j] += state.eta * (payload.embedding[j] - mean[j]);
}

/// Interacting-GMM backend: the computationally cheap, mathematically
/// tractable stand-in for the retrieval agents. Component means start at the
/// shared archetypes plus per-agent init noise; pseudo-counts start uniform.
class GmmBackend {
public:
    using State = GmmAgentState;

    explicit GmmBackend(const SystemConfig& cfg)
        : params_(std::get<GmmParams>(cfg.backend)), d_(cfg.d), L_(cfg.L) {
        RngStream corpus(derive_seed(cfg.seed, {.role = StreamRole::Corpus}));
        archetypes_ = draw_archetypes(L_, d_, params_.rho, corpus);
    }

    State initial_state(std::uint32_t /*agent*/, RngStream& rng) const {
        State state;
        state.alpha.assign(L_, params_.alpha0);
        state.means.reserve(L_);
        for (std::uint32_t l = 0; l < L_; ++l) {
            Embedding mean = archetypes_.means[l];
            for (double& x : mean) x += params_.sigma_init * rng.next_gaussian();
            state.means.push_back(std::move(mean));
        }
        state.sigma = params_.sigma;
        state.eta = params_.eta;
        state.decay = params_.decay;
        return state;
    }

    Answer respond(const State& state, RngStream& rng) const { return respond_gmm(state, rng); }
    void update(State& state, const Answer& payload) const { update_gmm(state, payload); }

    const LabelArchetypes& archetypes() const noexcept { return archetypes_; }

private:
    GmmParams params_;
    std::uint32_t d_;
    std::uint32_t L_;
    LabelArchetypes archetypes_;
};

} // namespace silosim
