#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pclique/global_cluster.hpp"
#include "pclique/graph.hpp"
#include "pclique/spectral.hpp"

namespace pclique {

namespace detail {

/// Inverse standard-normal CDF. Rational approximation (Acklam) polished by
/// one Halley step against erfc; absolute error far below 1e-9 on
/// (1e-8, 1-1e-8). Outside that range the caller rejects the input.
inline double inverse_normal_cdf(double prob) {
    if (!(prob > 1e-8 && prob < 1.0 - 1e-8))
        throw std::invalid_argument("inverse_normal_cdf: argument outside (1e-8, 1-1e-8)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (prob < p_low) {
        const double q = std::sqrt(-2.0 * std::log(prob));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (prob <= 1.0 - p_low) {
        const double q = prob - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley refinement: e = Phi(x) - prob.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace detail

/// Constants for the over-clustering control at tolerance alpha: the
/// (1-alpha) normal quantile, its density, and the composite factor xi that
/// collapses the truncated-normal mean and variance into one multiplier.
struct ThresholdParams {
    double alpha = 0.0;
    double z_alpha = 0.0;
    double phi_z = 0.0;
    double xi = 0.0;
};

/// Moments of the cross-density of the worst tolerated split of a uniform
/// random graph with density p0 on n nodes (top-alpha truncated normal).
struct TruncatedNormalMoments {
    double mean = 0.0;
    double variance = 0.0;
    double p0 = 0.0;
    NodeId n = 0;
    double alpha = 0.0;
};

inline ThresholdParams make_threshold_params(double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw std::invalid_argument("make_threshold_params: alpha must lie in (0, 0.5]");
    ThresholdParams tp;
    tp.alpha = alpha;
    tp.z_alpha = alpha == 0.5 ? 0.0 : detail::inverse_normal_cdf(1.0 - alpha);
    tp.phi_z = detail::normal_pdf(tp.z_alpha);
    const double ratio = tp.phi_z / (1.0 - alpha);
    const double bracket = 1.0 - tp.z_alpha * ratio - ratio * ratio;
    if (bracket < 0.0)
        throw std::invalid_argument("make_threshold_params: negative variance bracket");
    tp.xi = ratio + tp.z_alpha * std::sqrt(bracket);
    return tp;
}

inline TruncatedNormalMoments truncated_moments(double p0, NodeId n, double alpha) {
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::domain_error("truncated_moments: p0 must lie strictly in (0,1)");
    if (n < 2) throw std::invalid_argument("truncated_moments: n must be >= 2");
    const ThresholdParams tp = make_threshold_params(alpha);
    const double base = p0 * (1.0 - p0) / ((1.0 - alpha) * static_cast<double>(n));
    const double ratio = tp.phi_z / (1.0 - alpha);
    TruncatedNormalMoments m;
    m.mean = p0 - ratio * std::sqrt(base);
    m.variance = base * (1.0 - tp.z_alpha * ratio - ratio * ratio);
    m.p0 = p0;
    m.n = n;
    m.alpha = alpha;
    return m;
}

/// Largest threshold that keeps the chance of splitting a structureless
/// density-p0 graph below alpha: max{0, p0 - xi(alpha) sqrt(p0(1-p0)/((1-alpha)n))}.
inline double upper_threshold(double p0, NodeId n, const ThresholdParams& tp) {
    if (!(p0 >= 0.0 && p0 <= 1.0))
        throw std::invalid_argument("upper_threshold: p0 must lie in [0,1]");
    if (n < 2) throw std::invalid_argument("upper_threshold: n must be >= 2");
    const double base = p0 * (1.0 - p0) / ((1.0 - tp.alpha) * static_cast<double>(n));
    return std::max(0.0, p0 - tp.xi * std::sqrt(base));
}

/// Smallest threshold that keeps two independent uniform random graphs with
/// cross-density p12 separated with probability 1-beta. Diagnostic only:
/// p12 is rarely observable in practice.
inline double lower_threshold(double p12, NodeId n1, NodeId n2, double beta) {
    if (!(p12 >= 0.0 && p12 < 1.0))
        throw std::invalid_argument("lower_threshold: p12 must lie in [0,1)");
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("lower_threshold: sizes must be >= 1");
    if (!(beta > 0.0 && beta < 0.5))
        throw std::invalid_argument("lower_threshold: beta must lie in (0, 0.5)");
    const double z = detail::inverse_normal_cdf(1.0 - beta);
    return p12 + z * std::sqrt(p12 * (1.0 - p12) /
                               (static_cast<double>(n1) * static_cast<double>(n2)));
}

/// Per-subnetwork threshold: the upper bound evaluated at the observed
/// clique score.
inline double local_threshold(const Graph& g_sub, const ThresholdParams& tp) {
    if (g_sub.node_count() < 2) throw std::domain_error("local_threshold: need at least 2 nodes");
    return upper_threshold(clique_score(g_sub, all_nodes(g_sub)), g_sub.node_count(), tp);
}

/// Unnormalized split score of a two-sided assignment and the score of
/// leaving the subnetwork whole. The difference reduces to
/// 2 sum_{cross ordered pairs} (p_v - a_ij): a split wins exactly when the
/// cross-pair link density is below p_v.
struct SplitGain {
    double gain = 0.0;
    double no_split_score = 0.0;
};

inline SplitGain split_gain(const Graph& g_sub, const SignVector& s, double p_v) {
    const NodeId n = g_sub.node_count();
    if (static_cast<NodeId>(s.size()) != n)
        throw std::invalid_argument("split_gain: sign vector length mismatch");

    std::int64_t n_pos = 0;
    for (std::int8_t v : s) {
        if (v != 1 && v != -1) throw std::invalid_argument("split_gain: signs must be +-1");
        n_pos += (v == 1);
    }
    const std::int64_t n_neg = n - n_pos;

    std::int64_t crossing = 0;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : g_sub.neighbors(i))
            crossing += (s[static_cast<std::size_t>(i)] != s[static_cast<std::size_t>(j)]);
    crossing /= 2;

    const double pairs = static_cast<double>(n) * (n - 1.0);
    const double m = static_cast<double>(g_sub.edge_count());
    const double cross_pairs = 2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg);
    const double same_pairs = pairs - cross_pairs;
    const double internal_ordered = 2.0 * (m - static_cast<double>(crossing));
    const double cross_ordered = 2.0 * static_cast<double>(crossing);

    SplitGain out;
    out.no_split_score = 2.0 * m - p_v * pairs;
    out.gain = (internal_ordered - p_v * same_pairs) + (p_v * cross_pairs - cross_ordered);
    assert(std::abs((out.gain - out.no_split_score) -
                    2.0 * (p_v * cross_pairs - 2.0 * static_cast<double>(crossing))) <=
           1e-9 * (1.0 + pairs));
    return out;
}

/// Binary subdivision tree. Internal nodes carry the split that was taken;
/// leaves are the reported communities. Nodes live in a flat pool with the
/// root at index `root`; children precede nothing in particular but the
/// layout is deterministic (left subtree before right).
struct ClusterTreeNode {
    bool leaf = true;
    NodeSet members;          // parent-graph labels, ascending
    NodeId size = 0;
    double observed_score = 0.0;  // clique score of the subnetwork
    double threshold = 0.0;       // localized threshold used at this node
    double gain = 0.0;            // unnormalized split score of the attempted split
    int left = -1;
    int right = -1;
};

struct ClusterTree {
    NodeId n = 0;
    int root = -1;
    std::vector<ClusterTreeNode> nodes;

    std::vector<int> leaves() const {
        std::vector<int> out;
        collect_leaves(root, out);
        return out;
    }

    /// Communities numbered by leaf order (left subtree first).
    Partition to_partition() const {
        Partition part;
        part.membership.assign(static_cast<std::size_t>(n), -1);
        for (int idx : leaves()) {
            for (NodeId i : nodes[static_cast<std::size_t>(idx)].members)
                part.membership[static_cast<std::size_t>(i)] = part.count;
            part.sizes.push_back(nodes[static_cast<std::size_t>(idx)].size);
            ++part.count;
        }
        return part;
    }

private:
    void collect_leaves(int idx, std::vector<int>& out) const {
        if (idx < 0) return;
        const auto& node = nodes[static_cast<std::size_t>(idx)];
        if (node.leaf) {
            out.push_back(idx);
        } else {
            collect_leaves(node.left, out);
            collect_leaves(node.right, out);
        }
    }
};

struct LocalClusterConfig {
    double alpha = 0.025;
    SolverConfig solver;
    int max_depth = 64;
};

namespace detail {

struct LocalClusterState {
    const Graph& g;
    const LocalClusterConfig& cfg;
    ThresholdParams tp;
    ClusterTree tree;

    int build(const NodeSet& members, int depth) {
        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        {
            auto& node = tree.nodes.back();
            node.members = members;
            node.size = static_cast<NodeId>(members.size());
        }

        if (members.size() <= 1) {
            auto& node = tree.nodes[static_cast<std::size_t>(idx)];
            node.observed_score = 1.0;
            node.threshold = 1.0;
            return idx;
        }

        Subgraph sub = subgraph(g, members);
        const double p_obs = clique_score(sub.graph, all_nodes(sub.graph));
        const double p_v = upper_threshold(p_obs, sub.graph.node_count(), tp);
        tree.nodes[static_cast<std::size_t>(idx)].observed_score = p_obs;
        tree.nodes[static_cast<std::size_t>(idx)].threshold = p_v;

#ifndef NDEBUG
        // p_v <= p_obs, so the no-split score stays non-negative here.
        {
            const double nn = static_cast<double>(sub.graph.node_count());
            const double sum_c = 2.0 * static_cast<double>(sub.graph.edge_count()) - p_v * nn * (nn - 1.0);
            assert(sum_c >= -1e-9 * nn * nn);
        }
#endif

        if (depth >= cfg.max_depth) return idx;

        EigenResult eig;
        try {
            eig = leading_eigenpair(pclique_operator(sub.graph, p_v), cfg.solver);
        } catch (const numerical_error&) {
            return idx;
        }
        if (!eig.converged) return idx;

        const SignVector s = round_signs(eig.vector);
        const SplitGain sg = split_gain(sub.graph, s, p_v);
        tree.nodes[static_cast<std::size_t>(idx)].gain = sg.gain;

        NodeSet pos, neg;
        for (NodeId i = 0; i < sub.graph.node_count(); ++i)
            (s[static_cast<std::size_t>(i)] == 1 ? pos : neg).push_back(i);
        if (pos.empty() || neg.empty()) return idx;
        if (!(sg.gain > sg.no_split_score)) return idx;

        const int left = build(sub.to_parent_labels(pos), depth + 1);
        const int right = build(sub.to_parent_labels(neg), depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(idx)];
        node.leaf = false;
        node.left = left;
        node.right = right;
        return idx;
    }
};

}  // namespace detail

/// Recursive bipartition with a freshly selected threshold per subnetwork.
/// The returned tree's leaves are the communities.
inline ClusterTree cluster_localized(const Graph& g, const LocalClusterConfig& cfg) {
    if (g.node_count() < 1) throw std::invalid_argument("cluster_localized: empty graph");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5))
        throw std::invalid_argument("cluster_localized: alpha must lie in (0, 0.5)");

    detail::LocalClusterState state{g, cfg, make_threshold_params(cfg.alpha), {}};
    state.tree.n = g.node_count();
    state.tree.root = state.build(all_nodes(g), 0);
    return state.tree;
}

/// Tree-accumulated clustering score: the recorded split scores of all
/// internal nodes, averaged over the ordered node pairs of the whole graph.
inline double local_clique_index(const ClusterTree& tree, NodeId n) {
    if (n < 2) throw std::domain_error("local_clique_index: need at least 2 nodes");
    double total = 0.0;
    for (const auto& node : tree.nodes)
        if (!node.leaf) total += node.gain;
    return total / (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

}  // namespace pclique
