#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "silosim/errors.hpp"
#include "silosim/types.hpp"

namespace silosim {

/// Symmetric matrix of pairwise L2 distances between the agents' answer
/// embeddings at one tick. Zero diagonal; each pair computed once.
class DistanceMatrix {
public:
    static DistanceMatrix from_embeddings(std::span<const Embedding> xs) {
        const std::size_t n = xs.size();
        for (std::size_t i = 0; i < n; ++i)
            if (!all_finite(xs[i]))
                throw Error("non-finite embedding component for agent " + std::to_string(i));
        DistanceMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dist = l2_distance(xs[i], xs[j]);
                m.data_[i * n + j] = dist;
                m.data_[j * n + i] = dist;
            }
        }
        return m;
    }

    static DistanceMatrix from_answers(std::span<const Answer> answers) {
        std::vector<Embedding> xs;
        xs.reserve(answers.size());
        for (const auto& a : answers) xs.push_back(a.embedding);
        return from_embeddings(xs);
    }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    std::size_t size() const noexcept { return n_; }

private:
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t n_;
    std::vector<double> data_;
};

/// The k agents nearest to agent i. Distance ties break toward the lower
/// agent index (post-convergence all-zero distances make this rule load
/// bearing for reproducibility). The result is sorted by ascending index.
inline std::vector<std::uint32_t> k_nearest(const DistanceMatrix& D, std::uint32_t i,
                                            std::uint32_t k) {
    const std::size_t n = D.size();
    if (n < 2 || k < 1 || k > n - 1)
        throw Error("k_nearest: k=" + std::to_string(k) + " out of range for n=" +
                    std::to_string(n));
    std::vector<std::pair<double, std::uint32_t>> order;
    order.reserve(n - 1);
    for (std::uint32_t j = 0; j < n; ++j)
        if (j != i) order.emplace_back(D(i, j), j);
    std::sort(order.begin(), order.end());
    std::vector<std::uint32_t> result;
    result.reserve(k);
    for (std::uint32_t r = 0; r < k; ++r) result.push_back(order[r].second);
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace silosim
