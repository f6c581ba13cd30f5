#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pclique/graph.hpp"

namespace pclique {

/// Block sizes plus a symmetric matrix of within/between link probabilities.
/// Off-diagonal probabilities may not exceed either diagonal they connect,
/// otherwise the generated networks would contradict assortative clustering.
struct BlockModelSpec {
    std::vector<NodeId> sizes;
    std::vector<std::vector<double>> link_probs;

    NodeId total_nodes() const {
        NodeId n = 0;
        for (NodeId s : sizes) n += s;
        return n;
    }
};

inline std::vector<std::string> validate_spec(const BlockModelSpec& spec) {
    std::vector<std::string> errors;
    const std::size_t h = spec.sizes.size();
    if (h == 0) errors.push_back("no communities");
    for (std::size_t k = 0; k < h; ++k)
        if (spec.sizes[k] < 1)
            errors.push_back("community " + std::to_string(k) + " has size < 1");
    if (spec.link_probs.size() != h) {
        errors.push_back("probability matrix is not " + std::to_string(h) + "x" +
                         std::to_string(h));
        return errors;
    }
    for (std::size_t k = 0; k < h; ++k)
        if (spec.link_probs[k].size() != h) {
            errors.push_back("probability matrix row " + std::to_string(k) + " has wrong length");
            return errors;
        }
    for (std::size_t k = 0; k < h; ++k)
        for (std::size_t l = 0; l < h; ++l) {
            const double b = spec.link_probs[k][l];
            if (!(b >= 0.0 && b <= 1.0))
                errors.push_back("B[" + std::to_string(k) + "][" + std::to_string(l) +
                                 "] outside [0,1]");
        }
    for (std::size_t k = 0; k < h; ++k)
        for (std::size_t l = k + 1; l < h; ++l) {
            if (spec.link_probs[k][l] != spec.link_probs[l][k])
                errors.push_back("B not symmetric at (" + std::to_string(k) + "," +
                                 std::to_string(l) + ")");
            const double cap = std::min(spec.link_probs[k][k], spec.link_probs[l][l]);
            if (spec.link_probs[k][l] > cap)
                errors.push_back("B[" + std::to_string(k) + "][" + std::to_string(l) +
                                 "] exceeds min of the diagonals (assortativity)");
        }
    return errors;
}

inline void require_valid(const BlockModelSpec& spec) {
    const auto errors = validate_spec(spec);
    if (!errors.empty()) {
        std::string msg = "invalid block model spec:";
        for (const auto& e : errors) msg += " " + e + ";";
        throw std::invalid_argument(msg);
    }
}

/// Analytic overall edge density of the model.
inline double expected_density(const BlockModelSpec& spec) {
    require_valid(spec);
    const NodeId n = spec.total_nodes();
    if (n < 2) throw std::domain_error("expected_density: need at least 2 nodes");
    double expected = 0.0;
    const std::size_t h = spec.sizes.size();
    for (std::size_t k = 0; k < h; ++k) {
        const double nk = static_cast<double>(spec.sizes[k]);
        expected += nk * (nk - 1.0) / 2.0 * spec.link_probs[k][k];
        for (std::size_t l = k + 1; l < h; ++l)
            expected += nk * static_cast<double>(spec.sizes[l]) * spec.link_probs[k][l];
    }
    const double pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    return expected / pairs;
}

struct GeneratedNetwork {
    Graph graph;
    Partition truth;
    std::uint64_t seed = 0;
    double expected_density = 0.0;
};

/// Draws each unordered pair independently with its block probability.
/// Pairs are visited in lexicographic order with one uniform draw each, so a
/// seed pins the graph exactly (within one build). Nodes come out
/// community-contiguous unless `shuffle` is set.
inline GeneratedNetwork generate(const BlockModelSpec& spec, std::uint64_t seed,
                                 bool shuffle = false) {
    require_valid(spec);
    const NodeId n = spec.total_nodes();
    const std::size_t h = spec.sizes.size();

    std::vector<NodeId> block(static_cast<std::size_t>(n));
    {
        NodeId at = 0;
        for (std::size_t k = 0; k < h; ++k)
            for (NodeId t = 0; t < spec.sizes[k]; ++t) block[static_cast<std::size_t>(at++)] = static_cast<NodeId>(k);
    }

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1p-53; };

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i) {
        const auto& row = spec.link_probs[static_cast<std::size_t>(block[static_cast<std::size_t>(i)])];
        for (NodeId j = i + 1; j < n; ++j)
            if (uniform() < row[static_cast<std::size_t>(block[static_cast<std::size_t>(j)])])
                edges.emplace_back(i, j);
    }

    if (shuffle) {
        std::vector<NodeId> perm(static_cast<std::size_t>(n));
        for (NodeId i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (NodeId i = n - 1; i > 0; --i) {
            const auto j = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(i + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        for (auto& [u, v] : edges) {
            u = perm[static_cast<std::size_t>(u)];
            v = perm[static_cast<std::size_t>(v)];
        }
        std::vector<NodeId> shuffled(static_cast<std::size_t>(n));
        for (NodeId i = 0; i < n; ++i)
            shuffled[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = block[static_cast<std::size_t>(i)];
        block = std::move(shuffled);
    }

    GeneratedNetwork out;
    out.graph = Graph::from_edges(n, edges);
    out.truth = Partition::from_membership(std::move(block));
    out.seed = seed;
    out.expected_density = expected_density(spec);
    return out;
}

}  // namespace pclique
