#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pclique/graph.hpp"
#include "pclique/local_cluster.hpp"
#include "pclique/sbm.hpp"

namespace pclique::io {

using nlohmann::json;

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Edge list: one "u v" pair per line, 0-based ids, '#' starts a comment.
// A "#n=<int>" header pins the node count so trailing isolated nodes survive;
// otherwise the count is max id + 1.
// ---------------------------------------------------------------------------

inline Graph read_edge_list(std::istream& in, const std::string& name = "<edge list>") {
    std::vector<std::pair<NodeId, NodeId>> edges;
    NodeId declared_n = -1;
    NodeId max_id = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("#n=", 0) == 0) {
                try {
                    declared_n = static_cast<NodeId>(std::stol(line.substr(3)));
                } catch (const std::exception&) {
                    throw parse_error(name + ":" + std::to_string(line_no) + ": bad #n= header");
                }
            }
            continue;
        }
        std::istringstream ls(line);
        long u = 0, v = 0;
        if (!(ls >> u >> v))
            throw parse_error(name + ":" + std::to_string(line_no) + ": expected 'u v'");
        std::string extra;
        if (ls >> extra)
            throw parse_error(name + ":" + std::to_string(line_no) + ": trailing tokens");
        if (u < 0 || v < 0)
            throw parse_error(name + ":" + std::to_string(line_no) + ": negative node id");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        max_id = std::max({max_id, static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
    const NodeId n = declared_n >= 0 ? declared_n : max_id + 1;
    if (declared_n >= 0 && max_id >= declared_n)
        throw parse_error(name + ": node " + std::to_string(max_id) +
                          " exceeds declared count " + std::to_string(declared_n));
    try {
        return Graph::from_edges(n, edges);
    } catch (const std::exception& e) {
        throw parse_error(name + ": " + e.what());
    }
}

inline Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open edge list: " + path);
    return read_edge_list(in, path);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    out << "#n=" << g.node_count() << "\n";
    for (const auto& [u, v] : g.edges()) out << u << " " << v << "\n";
}

inline void write_edge_list_file(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write edge list: " + path);
    write_edge_list(out, g);
}

// ---------------------------------------------------------------------------
// Membership CSV: header "node,community", then one row per node.
// ---------------------------------------------------------------------------

inline void write_membership(std::ostream& out, const Partition& part) {
    out << "node,community\n";
    for (std::size_t i = 0; i < part.membership.size(); ++i)
        out << i << "," << part.membership[i] << "\n";
}

inline void write_membership_file(const std::string& path, const Partition& part) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write membership: " + path);
    write_membership(out, part);
}

/// Reads a membership file covering exactly the nodes 0..n-1 (n inferred from
/// the rows). Missing or duplicate nodes are reported by id.
inline Partition read_membership(std::istream& in, const std::string& name = "<membership>") {
    std::string line;
    if (!std::getline(in, line) || line.rfind("node,community", 0) != 0)
        throw parse_error(name + ": missing 'node,community' header");
    std::vector<std::pair<NodeId, NodeId>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw parse_error(name + ":" + std::to_string(line_no) + ": expected 'node,community'");
        try {
            const long node = std::stol(line.substr(0, comma));
            const long comm = std::stol(line.substr(comma + 1));
            if (node < 0 || comm < 0) throw std::invalid_argument("negative");
            rows.emplace_back(static_cast<NodeId>(node), static_cast<NodeId>(comm));
        } catch (const std::exception&) {
            throw parse_error(name + ":" + std::to_string(line_no) + ": bad row '" + line + "'");
        }
    }
    if (rows.empty()) throw parse_error(name + ": no rows");
    NodeId n = 0;
    for (const auto& [node, comm] : rows) n = std::max(n, static_cast<NodeId>(node + 1));
    std::vector<NodeId> labels(static_cast<std::size_t>(n), -1);
    for (const auto& [node, comm] : rows) {
        if (labels[static_cast<std::size_t>(node)] != -1)
            throw parse_error(name + ": duplicate node " + std::to_string(node));
        labels[static_cast<std::size_t>(node)] = comm;
    }
    for (NodeId i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] == -1)
            throw parse_error(name + ": missing node " + std::to_string(i));
    return Partition::from_membership(std::move(labels));
}

inline Partition read_membership_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open membership: " + path);
    return read_membership(in, path);
}

// ---------------------------------------------------------------------------
// Block model spec JSON: {"sizes": [int...], "B": [[float...]...]}.
// ---------------------------------------------------------------------------

inline BlockModelSpec spec_from_json(const json& j) {
    BlockModelSpec spec;
    if (!j.is_object() || !j.contains("sizes") || !j.contains("B"))
        throw parse_error("block model spec needs 'sizes' and 'B'");
    try {
        spec.sizes = j.at("sizes").get<std::vector<NodeId>>();
        spec.link_probs = j.at("B").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("block model spec: ") + e.what());
    }
    return spec;
}

inline BlockModelSpec read_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open spec: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
    return spec_from_json(j);
}

inline json spec_to_json(const BlockModelSpec& spec) {
    return json{{"sizes", spec.sizes}, {"B", spec.link_probs}};
}

// ---------------------------------------------------------------------------
// Cluster tree JSON. Leaves carry their members; internal nodes carry their
// two children. "gain" is the unnormalized split score recorded at the node.
// ---------------------------------------------------------------------------

inline json tree_node_to_json(const ClusterTree& tree, int idx) {
    const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
    json j{{"kind", node.leaf ? "leaf" : "internal"},
           {"size", node.size},
           {"p_obs", node.observed_score},
           {"p_v", node.threshold},
           {"gain", node.gain}};
    if (node.leaf) {
        NodeSet sorted = node.members;
        std::sort(sorted.begin(), sorted.end());
        j["members"] = sorted;
    } else {
        j["children"] = json::array({tree_node_to_json(tree, node.left),
                                     tree_node_to_json(tree, node.right)});
    }
    return j;
}

inline json tree_to_json(const ClusterTree& tree) {
    if (tree.root < 0) throw std::invalid_argument("tree_to_json: empty tree");
    return tree_node_to_json(tree, tree.root);
}

inline int tree_node_from_json(const json& j, ClusterTree& tree) {
    if (!j.is_object() || !j.contains("kind"))
        throw parse_error("tree node: missing 'kind'");
    ClusterTreeNode node;
    const std::string kind = j.at("kind").get<std::string>();
    node.size = j.at("size").get<NodeId>();
    node.observed_score = j.at("p_obs").get<double>();
    node.threshold = j.at("p_v").get<double>();
    node.gain = j.at("gain").get<double>();
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    if (kind == "leaf") {
        tree.nodes[static_cast<std::size_t>(idx)].members = j.at("members").get<NodeSet>();
        if (static_cast<NodeId>(tree.nodes[static_cast<std::size_t>(idx)].members.size()) != node.size)
            throw parse_error("tree node: member count disagrees with size");
    } else if (kind == "internal") {
        const auto& children = j.at("children");
        if (!children.is_array() || children.size() != 2)
            throw parse_error("tree node: internal node needs exactly 2 children");
        const int left = tree_node_from_json(children[0], tree);
        const int right = tree_node_from_json(children[1], tree);
        auto& stored = tree.nodes[static_cast<std::size_t>(idx)];
        stored.leaf = false;
        stored.left = left;
        stored.right = right;
        auto& ls = tree.nodes[static_cast<std::size_t>(left)].members;
        auto& rs = tree.nodes[static_cast<std::size_t>(right)].members;
        NodeSet merged;
        merged.reserve(ls.size() + rs.size());
        merged.insert(merged.end(), ls.begin(), ls.end());
        merged.insert(merged.end(), rs.begin(), rs.end());
        std::sort(merged.begin(), merged.end());
        stored.members = std::move(merged);
        if (static_cast<NodeId>(stored.members.size()) != stored.size)
            throw parse_error("tree node: children do not cover the declared size");
    } else {
        throw parse_error("tree node: unknown kind '" + kind + "'");
    }
    return idx;
}

inline ClusterTree tree_from_json(const json& j) {
    ClusterTree tree;
    tree.root = tree_node_from_json(j, tree);
    tree.n = tree.nodes[static_cast<std::size_t>(tree.root)].size;
    return tree;
}

// ---------------------------------------------------------------------------
// DOT export: nodes filled by community color (distinct HSV hues).
// ---------------------------------------------------------------------------

inline void write_dot(std::ostream& out, const Graph& g, const Partition& part) {
    if (static_cast<NodeId>(part.membership.size()) != g.node_count())
        throw std::invalid_argument("write_dot: partition size mismatch");
    out << "graph communities {\n";
    out << "  node [style=filled];\n";
    const int h = std::max<int>(part.count, 1);
    for (NodeId i = 0; i < g.node_count(); ++i) {
        const double hue = static_cast<double>(part.membership[static_cast<std::size_t>(i)]) / h;
        char color[48];
        std::snprintf(color, sizeof(color), "%.4f 0.600 0.900", hue);
        out << "  " << i << " [fillcolor=\"" << color << "\"];\n";
    }
    for (const auto& [u, v] : g.edges()) out << "  " << u << " -- " << v << ";\n";
    out << "}\n";
}

inline void write_dot_file(const std::string& path, const Graph& g, const Partition& part) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write dot file: " + path);
    write_dot(out, g, part);
}

}  // namespace pclique::io
