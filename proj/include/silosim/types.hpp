#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "silosim/errors.hpp"

namespace silosim {

/// Cluster identity of an answer. Two labels denote the same silo iff their
/// ids are equal; the name (flower species, when known) is carried for
/// reporting only. id -1 is the "unknown" sentinel produced by the LLM
/// backend when no listed name occurs in a reply; unknown answers are
/// excluded from silo counts and entropy but still occupy a slot in the
/// stability denominator.
struct SiloLabel {
    std::int32_t id = 0;
    std::string name;

    static constexpr std::int32_t kUnknownId = -1;

    static SiloLabel unknown() { return SiloLabel{kUnknownId, "unknown"}; }
    bool is_unknown() const noexcept { return id == kUnknownId; }

    friend bool operator==(const SiloLabel& a, const SiloLabel& b) noexcept {
        return a.id == b.id;
    }
};

/// Fixed-length real vector produced by the (real or synthetic) embedding
/// model. All embeddings of one system share one dimension d.
using Embedding = std::vector<double>;

/// L2 distance between two embeddings of equal dimension.
inline double l2_distance(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size())
        throw Error("embedding dimension mismatch: " + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

inline bool all_finite(const Embedding& e) noexcept {
    for (double v : e)
        if (!std::isfinite(v)) return false;
    return true;
}

/// One agent's response at one tick.
struct Answer {
    SiloLabel label;
    Embedding embedding;
    std::string text; // empty for synthetic backends

    bool operator==(const Answer&) const = default;
};

/// One entry of an agent's knowledge base. inserted_at is a monotone
/// insertion sequence number (initial items 0..C-1, then one per update), so
/// FIFO order is recoverable from the stored items alone.
struct DatabaseItem {
    SiloLabel label;
    Embedding embedding;
    std::string text;
    std::int64_t inserted_at = 0;

    bool operator==(const DatabaseItem&) const = default;
};

/// Bounded FIFO store of database items: the agent's external memory.
/// Eviction is strictly oldest-first and happens only when a push would
/// exceed the capacity fixed at construction.
class AgentDatabase {
public:
    explicit AgentDatabase(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0)
            throw ConfigError("agent database capacity must be positive");
        items_.reserve(capacity + 1);
    }

    void push(DatabaseItem item) {
        if (!items_.empty() && item.inserted_at < items_.back().inserted_at)
            throw Error("database insertion order must be monotone");
        items_.push_back(std::move(item));
        if (items_.size() > capacity_)
            items_.erase(items_.begin());
    }

    const std::vector<DatabaseItem>& items() const noexcept { return items_; }
    const DatabaseItem& newest() const { return items_.back(); }
    std::size_t size() const noexcept { return items_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return items_.empty(); }

    bool operator==(const AgentDatabase&) const = default;

private:
    std::vector<DatabaseItem> items_; // front = oldest
    std::size_t capacity_;
};

} // namespace silosim
