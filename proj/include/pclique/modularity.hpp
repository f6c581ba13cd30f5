#pragma once

#include <stdexcept>
#include <vector>

#include "pclique/global_cluster.hpp"
#include "pclique/graph.hpp"
#include "pclique/spectral.hpp"

namespace pclique {

struct ModularityConfig {
    SolverConfig solver;
    double eig_zero_tol = 0.0;  // 0 -> 1e-9 * operator norm bound
    int max_depth = 64;
};

/// Newman modularity of a partition: fraction of edges inside communities
/// minus its expectation under the degree-preserving null model.
inline double modularity_score(const Graph& g, const Partition& part) {
    const double vol = static_cast<double>(volume(g));
    if (vol <= 0.0) throw std::domain_error("modularity_score: graph has zero volume");
    if (static_cast<NodeId>(part.membership.size()) != g.node_count())
        throw std::invalid_argument("modularity_score: partition size mismatch");

    std::vector<double> internal_twice(static_cast<std::size_t>(part.count), 0.0);
    std::vector<double> community_volume(static_cast<std::size_t>(part.count), 0.0);
    for (NodeId i = 0; i < g.node_count(); ++i) {
        const auto ci = static_cast<std::size_t>(part.membership[static_cast<std::size_t>(i)]);
        community_volume[ci] += static_cast<double>(g.degree(i));
        for (NodeId j : g.neighbors(i))
            internal_twice[ci] += (part.membership[static_cast<std::size_t>(j)] ==
                                   part.membership[static_cast<std::size_t>(i)]);
    }
    double q = 0.0;
    for (std::size_t k = 0; k < internal_twice.size(); ++k)
        q += internal_twice[k] / vol - (community_volume[k] / vol) * (community_volume[k] / vol);
    return q;
}

struct ModularityResult {
    Partition partition;
    bool all_converged = true;  // false if any subdivision stopped on solver failure
};

namespace detail {

struct ModularityState {
    const Graph& g;
    const ModularityConfig& cfg;
    std::vector<NodeSet> communities;
    bool all_converged = true;

    void recurse(const NodeSet& members, int depth) {
        if (members.size() <= 1 || depth >= cfg.max_depth) {
            communities.push_back(members);
            return;
        }
        const SymmetricOperator op = modularity_operator(g, members);
        EigenResult eig;
        bool failed = false;
        try {
            eig = leading_eigenpair(op, cfg.solver);
        } catch (const numerical_error&) {
            failed = true;
        }
        if (failed || !eig.converged) {
            all_converged = false;
            communities.push_back(members);
            return;
        }
        const double zero_tol =
            cfg.eig_zero_tol > 0.0 ? cfg.eig_zero_tol : 1e-9 * std::max(op.norm_bound, 1.0);
        if (eig.lambda <= zero_tol) {
            communities.push_back(members);
            return;
        }
        NodeSet pos, neg;
        for (std::size_t i = 0; i < members.size(); ++i)
            (eig.vector[i] >= 0.0 ? pos : neg).push_back(members[i]);
        if (pos.empty() || neg.empty()) {
            communities.push_back(members);
            return;
        }
        recurse(pos, depth + 1);
        recurse(neg, depth + 1);
    }
};

}  // namespace detail

/// Leading-eigenvector modularity maximization with recursive subdivision;
/// a community stops subdividing when its generalized modularity operator
/// has no positive eigenvalue.
inline ModularityResult cluster_modularity(const Graph& g, const ModularityConfig& cfg) {
    if (g.node_count() < 1) throw std::invalid_argument("cluster_modularity: empty graph");
    if (volume(g) <= 0) {
        // No edges: nothing to maximize, report one community.
        ModularityResult out;
        std::vector<NodeId> labels(static_cast<std::size_t>(g.node_count()), 0);
        out.partition = Partition::from_membership(std::move(labels));
        return out;
    }

    detail::ModularityState state{g, cfg, {}, true};
    state.recurse(all_nodes(g), 0);

    ModularityResult out;
    out.partition.membership.assign(static_cast<std::size_t>(g.node_count()), -1);
    out.partition.count = static_cast<NodeId>(state.communities.size());
    out.partition.sizes.reserve(state.communities.size());
    for (std::size_t k = 0; k < state.communities.size(); ++k) {
        for (NodeId i : state.communities[k])
            out.partition.membership[static_cast<std::size_t>(i)] = static_cast<NodeId>(k);
        out.partition.sizes.push_back(static_cast<NodeId>(state.communities[k].size()));
    }
    out.all_converged = state.all_converged;
    return out;
}

}  // namespace pclique
