#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pclique/graph.hpp"
#include "pclique/spectral.hpp"

namespace pclique {

// Two-sided membership: +1 <-> first side, -1 <-> second side.
using SignVector = std::vector<std::int8_t>;

struct BipartitionResult {
    NodeSet side_pos;   // local labels of the subnetwork
    NodeSet side_neg;
    double delta_d = 0.0;  // split gain, normalized by the subnetwork size
    double sum_c = 0.0;    // sum of off-diagonal threshold-matrix entries
    bool trivial = false;  // one side empty
};

struct GlobalClusterConfig {
    double p = 0.5;  // global clique-score threshold
    SolverConfig solver;
    int max_depth = 64;
};

struct CommunityStats {
    double clique_score = 0.0;
    bool forced_stop = false;  // community emitted below threshold (trivial
                               // split, depth cap, or solver failure)
};

struct GlobalClusterResult {
    Partition partition;
    std::vector<CommunityStats> communities;  // indexed by community id
};

/// Clustering objective: connected same-community pairs reward 1-p,
/// disconnected cross-community pairs reward p, and the converse pairs
/// penalize by the same amounts; averaged over all ordered pairs.
inline double pclique_index(const Graph& g, const Partition& part, double p) {
    const NodeId n = g.node_count();
    if (n < 2) throw std::domain_error("pclique_index: need at least 2 nodes");
    if (static_cast<NodeId>(part.membership.size()) != n)
        throw std::invalid_argument("pclique_index: partition size mismatch");

    std::int64_t internal_twice = 0;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : g.neighbors(i))
            internal_twice += (part.membership[static_cast<std::size_t>(i)] ==
                               part.membership[static_cast<std::size_t>(j)]);

    double same_pairs = 0.0;  // ordered
    for (NodeId k = 0; k < part.count; ++k) {
        const double sz = static_cast<double>(part.sizes[static_cast<std::size_t>(k)]);
        same_pairs += sz * (sz - 1.0);
    }
    const double all_pairs = static_cast<double>(n) * (n - 1.0);
    const double cross_pairs = all_pairs - same_pairs;
    const double internal_ordered = static_cast<double>(internal_twice);
    const double cross_ordered = 2.0 * static_cast<double>(g.edge_count()) - internal_ordered;

    // Same side: sum (a_ij - p); cross: sum (p - a_ij), over ordered pairs.
    const double total = (internal_ordered - p * same_pairs) + (p * cross_pairs - cross_ordered);
    return total / all_pairs;
}

/// Split gain of a two-sided assignment relative to leaving the subnetwork
/// whole. Cancellation leaves only cross pairs:
///   sum_{i!=j} (s_i C_ij s_j - C_ij) = 4 (p n+ n- - cut),
/// normalized by n_norm (n_norm - 1).
inline double delta_d(const Graph& g_sub, const SignVector& s, double p, NodeId n_norm) {
    const NodeId n = g_sub.node_count();
    if (static_cast<NodeId>(s.size()) != n)
        throw std::invalid_argument("delta_d: sign vector length mismatch");
    if (n_norm < 2) throw std::invalid_argument("delta_d: normalization size must be >= 2");
    for (std::int8_t v : s)
        if (v != 1 && v != -1) throw std::invalid_argument("delta_d: signs must be +-1");

    std::int64_t n_pos = 0;
    for (std::int8_t v : s) n_pos += (v == 1);
    const std::int64_t n_neg = n - n_pos;

    std::int64_t crossing = 0;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : g_sub.neighbors(i))
            crossing += (s[static_cast<std::size_t>(i)] != s[static_cast<std::size_t>(j)]);
    crossing /= 2;

    const double norm = static_cast<double>(n_norm) * (static_cast<double>(n_norm) - 1.0);
    return 4.0 * (p * static_cast<double>(n_pos) * static_cast<double>(n_neg) -
                  static_cast<double>(crossing)) /
           norm;
}

namespace detail {

inline SignVector round_signs(const std::vector<double>& v) {
    SignVector s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] >= 0.0 ? 1 : -1;
    return s;
}

}  // namespace detail

/// One spectral bipartition step: sign-round the leading eigenvector of the
/// threshold operator. Throws numerical_error if the solve does not converge.
inline BipartitionResult bipartition(const Graph& g_sub, double p, const SolverConfig& solver) {
    const NodeId n = g_sub.node_count();
    if (n < 1) throw std::invalid_argument("bipartition: empty subnetwork");

    BipartitionResult out;
    const double pairs = static_cast<double>(n) * (n - 1.0);
    out.sum_c = 2.0 * static_cast<double>(g_sub.edge_count()) - p * pairs;

    if (n == 1) {
        out.side_pos = {0};
        out.trivial = true;
        return out;
    }

    const SymmetricOperator op = pclique_operator(g_sub, p);
    const EigenResult eig = leading_eigenpair(op, solver);
    if (!eig.converged)
        throw numerical_error("bipartition: eigensolver did not converge", eig.iterations);

    const SignVector s = detail::round_signs(eig.vector);
    for (NodeId i = 0; i < n; ++i)
        (s[static_cast<std::size_t>(i)] == 1 ? out.side_pos : out.side_neg).push_back(i);
    out.trivial = out.side_pos.empty() || out.side_neg.empty();
    out.delta_d = delta_d(g_sub, s, p, n);
    return out;
}

namespace detail {

struct GlobalClusterState {
    const Graph& g;
    const GlobalClusterConfig& cfg;
    std::vector<NodeSet> communities;
    std::vector<CommunityStats> stats;

    void emit(const NodeSet& members, const Graph& sub) {
        CommunityStats st;
        st.clique_score = clique_score(sub, all_nodes(sub));
        st.forced_stop = st.clique_score < cfg.p;
        communities.push_back(members);
        stats.push_back(st);
    }

    void recurse(const NodeSet& members, int depth) {
        Subgraph sub = subgraph(g, members);
        const NodeId n = sub.graph.node_count();
        if (n == 1) {
            emit(members, sub.graph);
            return;
        }

        BipartitionResult split;
        bool solver_failed = false;
        try {
            split = bipartition(sub.graph, cfg.p, cfg.solver);
        } catch (const numerical_error&) {
            solver_failed = true;
        }

#ifndef NDEBUG
        if (!solver_failed) {
            // sum_c >= 0 and clique score >= p are the same test up to scale.
            const double score = clique_score(sub.graph, all_nodes(sub.graph));
            const double pairs = static_cast<double>(n) * (n - 1.0);
            if (std::abs(split.sum_c) > 1e-9 * pairs)
                assert((split.sum_c >= 0.0) == (score >= cfg.p));
        }
#endif

        const bool wants_split = !solver_failed && (split.delta_d > 0.0 || split.sum_c < 0.0);
        if (wants_split && !split.trivial && depth < cfg.max_depth) {
            recurse(sub.to_parent_labels(split.side_pos), depth + 1);
            recurse(sub.to_parent_labels(split.side_neg), depth + 1);
            return;
        }
        emit(members, sub.graph);
    }
};

}  // namespace detail

/// Recursive spectral bipartition under one global threshold. Every emitted
/// community either reaches clique score >= p or carries forced_stop.
inline GlobalClusterResult cluster_global(const Graph& g, const GlobalClusterConfig& cfg) {
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0))
        throw std::invalid_argument("cluster_global: p must lie in [0,1]");
    if (g.node_count() < 1) throw std::invalid_argument("cluster_global: empty graph");

    detail::GlobalClusterState state{g, cfg, {}, {}};
    state.recurse(all_nodes(g), 0);

    // Community ids follow the left-then-right recursion order, so the stats
    // vector lines up with the partition's community indices.
    GlobalClusterResult out;
    out.partition.membership.assign(static_cast<std::size_t>(g.node_count()), -1);
    out.partition.count = static_cast<NodeId>(state.communities.size());
    out.partition.sizes.reserve(state.communities.size());
    for (std::size_t k = 0; k < state.communities.size(); ++k) {
        for (NodeId i : state.communities[k])
            out.partition.membership[static_cast<std::size_t>(i)] = static_cast<NodeId>(k);
        out.partition.sizes.push_back(static_cast<NodeId>(state.communities[k].size()));
    }
    out.communities = std::move(state.stats);
    return out;
}

}  // namespace pclique
