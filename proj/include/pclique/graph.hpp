#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pclique {

using NodeId = std::int32_t;

// Ordered list of distinct node ids within some parent graph.
using NodeSet = std::vector<NodeId>;

/// Immutable undirected simple graph on nodes 0..n-1.
///
/// Adjacency is stored as CSR with sorted neighbor lists; no self-loops,
/// no parallel edges. Safe to share across threads once constructed.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from unordered node pairs. Duplicate pairs collapse
    /// to a single edge; self-loops and out-of-range endpoints are rejected.
    static Graph from_edges(NodeId n, std::span<const std::pair<NodeId, NodeId>> edges) {
        if (n < 0) throw std::invalid_argument("graph: negative node count");
        Graph g;
        g.n_ = n;
        std::vector<std::pair<NodeId, NodeId>> canon;
        canon.reserve(edges.size());
        for (const auto& [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw std::out_of_range("graph: edge endpoint " +
                                        std::to_string(u >= n || u < 0 ? u : v) +
                                        " outside 0.." + std::to_string(n - 1));
            if (u == v)
                throw std::invalid_argument("graph: self-loop at node " + std::to_string(u));
            canon.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(canon.begin(), canon.end());
        canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

        g.m_ = static_cast<std::int64_t>(canon.size());
        g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (const auto& [u, v] : canon) {
            ++g.offsets_[static_cast<std::size_t>(u) + 1];
            ++g.offsets_[static_cast<std::size_t>(v) + 1];
        }
        for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
        g.neighbors_.resize(static_cast<std::size_t>(2) * canon.size());
        std::vector<std::int64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& [u, v] : canon) {
            g.neighbors_[static_cast<std::size_t>(cursor[u]++)] = v;
            g.neighbors_[static_cast<std::size_t>(cursor[v]++)] = u;
        }
        // Filling in sorted edge order leaves every neighbor list sorted.
        return g;
    }

    NodeId node_count() const { return n_; }
    std::int64_t edge_count() const { return m_; }

    std::span<const NodeId> neighbors(NodeId i) const {
        check_node(i);
        const auto b = static_cast<std::size_t>(offsets_[i]);
        const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(i) + 1]);
        return {neighbors_.data() + b, e - b};
    }

    NodeId degree(NodeId i) const {
        check_node(i);
        return static_cast<NodeId>(offsets_[static_cast<std::size_t>(i) + 1] - offsets_[i]);
    }

    bool has_edge(NodeId i, NodeId j) const {
        check_node(i);
        check_node(j);
        auto nb = neighbors(i);
        return std::binary_search(nb.begin(), nb.end(), j);
    }

    /// Unordered edge pairs (u < v) in lexicographic order.
    std::vector<std::pair<NodeId, NodeId>> edges() const {
        std::vector<std::pair<NodeId, NodeId>> out;
        out.reserve(static_cast<std::size_t>(m_));
        for (NodeId u = 0; u < n_; ++u)
            for (NodeId v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

private:
    void check_node(NodeId i) const {
        if (i < 0 || i >= n_)
            throw std::out_of_range("graph: node " + std::to_string(i) + " outside 0.." +
                                    std::to_string(n_ - 1));
    }

    NodeId n_ = 0;
    std::int64_t m_ = 0;
    std::vector<std::int64_t> offsets_{0};
    std::vector<NodeId> neighbors_;
};

/// Node -> community assignment with compact community ids 0..count-1.
struct Partition {
    std::vector<NodeId> membership;
    NodeId count = 0;
    std::vector<NodeId> sizes;

    /// Compacts arbitrary non-negative labels to 0..h-1 in first-seen order.
    static Partition from_membership(std::vector<NodeId> labels) {
        Partition part;
        std::vector<NodeId> remap;
        for (NodeId& c : labels) {
            if (c < 0) throw std::invalid_argument("partition: negative community label");
            auto it = std::find(remap.begin(), remap.end(), c);
            NodeId compact;
            if (it == remap.end()) {
                compact = static_cast<NodeId>(remap.size());
                remap.push_back(c);
            } else {
                compact = static_cast<NodeId>(it - remap.begin());
            }
            c = compact;
        }
        part.membership = std::move(labels);
        part.count = static_cast<NodeId>(remap.size());
        part.sizes.assign(static_cast<std::size_t>(part.count), 0);
        for (NodeId c : part.membership) ++part.sizes[static_cast<std::size_t>(c)];
        return part;
    }

    NodeSet community(NodeId k) const {
        NodeSet s;
        for (NodeId i = 0; i < static_cast<NodeId>(membership.size()); ++i)
            if (membership[static_cast<std::size_t>(i)] == k) s.push_back(i);
        return s;
    }
};

namespace detail {

inline void check_node_set(const Graph& g, const NodeSet& s, const char* what) {
    std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
    for (NodeId i : s) {
        if (i < 0 || i >= g.node_count())
            throw std::out_of_range(std::string(what) + ": node " + std::to_string(i) +
                                    " not in parent graph");
        if (seen[static_cast<std::size_t>(i)])
            throw std::invalid_argument(std::string(what) + ": duplicate node " +
                                        std::to_string(i));
        seen[static_cast<std::size_t>(i)] = 1;
    }
}

}  // namespace detail

/// Sum of all degrees; equals twice the edge count.
inline std::int64_t volume(const Graph& g) { return 2 * g.edge_count(); }

/// Number of edges with one endpoint in s1 and the other in s2.
/// The sets must be disjoint.
inline std::int64_t cut(const Graph& g, const NodeSet& s1, const NodeSet& s2) {
    detail::check_node_set(g, s1, "cut");
    detail::check_node_set(g, s2, "cut");
    std::vector<char> in2(static_cast<std::size_t>(g.node_count()), 0);
    for (NodeId i : s2) in2[static_cast<std::size_t>(i)] = 1;
    for (NodeId i : s1)
        if (in2[static_cast<std::size_t>(i)])
            throw std::invalid_argument("cut: sets overlap at node " + std::to_string(i));
    std::int64_t crossing = 0;
    for (NodeId i : s1)
        for (NodeId j : g.neighbors(i)) crossing += in2[static_cast<std::size_t>(j)];
    return crossing;
}

/// Edges of g with both endpoints inside s.
inline std::int64_t internal_edge_count(const Graph& g, const NodeSet& s) {
    detail::check_node_set(g, s, "internal_edge_count");
    std::vector<char> in(static_cast<std::size_t>(g.node_count()), 0);
    for (NodeId i : s) in[static_cast<std::size_t>(i)] = 1;
    std::int64_t twice = 0;
    for (NodeId i : s)
        for (NodeId j : g.neighbors(i)) twice += in[static_cast<std::size_t>(j)];
    return twice / 2;
}

/// Internal edge count of s divided by the pair count C(|s|,2).
/// A singleton scores 1: one node is vacuously complete.
inline double clique_score(const Graph& g, const NodeSet& s) {
    if (s.empty()) throw std::invalid_argument("clique_score: empty node set");
    if (s.size() == 1) {
        detail::check_node_set(g, s, "clique_score");
        return 1.0;
    }
    const auto k = static_cast<double>(s.size());
    const double pairs = k * (k - 1.0) / 2.0;
    return static_cast<double>(internal_edge_count(g, s)) / pairs;
}

/// Induced subgraph with nodes relabeled 0..|s|-1 (in the order given by s)
/// plus the map back to parent labels.
struct Subgraph {
    Graph graph;
    NodeSet to_parent;  // local label -> parent label

    NodeSet to_parent_labels(const NodeSet& local) const {
        NodeSet out;
        out.reserve(local.size());
        for (NodeId i : local) out.push_back(to_parent.at(static_cast<std::size_t>(i)));
        return out;
    }
};

inline Subgraph subgraph(const Graph& g, const NodeSet& s) {
    detail::check_node_set(g, s, "subgraph");
    std::vector<NodeId> local(static_cast<std::size_t>(g.node_count()), -1);
    for (std::size_t k = 0; k < s.size(); ++k) local[static_cast<std::size_t>(s[k])] = static_cast<NodeId>(k);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i : s) {
        const NodeId li = local[static_cast<std::size_t>(i)];
        for (NodeId j : g.neighbors(i)) {
            const NodeId lj = local[static_cast<std::size_t>(j)];
            if (lj >= 0 && li < lj) edges.emplace_back(li, lj);
        }
    }
    Subgraph out;
    out.graph = Graph::from_edges(static_cast<NodeId>(s.size()), edges);
    out.to_parent = s;
    return out;
}

inline NodeSet complement(const Graph& g, const NodeSet& s) {
    std::vector<char> in(static_cast<std::size_t>(g.node_count()), 0);
    for (NodeId i : s) in[static_cast<std::size_t>(i)] = 1;
    NodeSet out;
    for (NodeId i = 0; i < g.node_count(); ++i)
        if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

inline NodeSet all_nodes(const Graph& g) {
    NodeSet s(static_cast<std::size_t>(g.node_count()));
    for (NodeId i = 0; i < g.node_count(); ++i) s[static_cast<std::size_t>(i)] = i;
    return s;
}

}  // namespace pclique
