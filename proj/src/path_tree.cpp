#include "campussim/path_tree.hpp"

#include <algorithm>

namespace campussim {

const TreeNode& PathTree::node(int id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw ConfigError("node " + std::to_string(id) + " is not in the path tree");
    return it->second;
}

TreeNode& PathTree::node(int id) {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw ConfigError("node " + std::to_string(id) + " is not in the path tree");
    return it->second;
}

std::vector<int> PathTree::path_from_root(int id) const {
    std::vector<int> path;
    for (int v = id; v != -1; v = node(v).parent) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

PathTree build_path_tree(const RoadNetwork& net, int origin, const std::set<int>& destinations) {
    RoadNetwork::SourceTree src = net.source_tree(origin);
    for (int d : destinations) {
        net.index_of(d);
        if (src.parent.at(d) == -2) {
            throw ConfigError("destination node " + std::to_string(d) +
                              " is unreachable from origin " + std::to_string(origin));
        }
    }

    PathTree tree;
    tree.root = origin;
    TreeNode root;
    root.id = origin;
    tree.nodes[origin] = root;

    for (int d : destinations) {
        // Walk up the canonical parent chain, adding nodes until the already
        // built part of the tree is reached.
        std::vector<int> chain;
        int v = d;
        while (v != -1 && !tree.contains(v)) {
            chain.push_back(v);
            v = src.parent.at(v);
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            int id = *it;
            int parent = src.parent.at(id);
            TreeNode n;
            n.id = id;
            n.parent = parent;
            n.length_to_parent = src.dist.at(id) - src.dist.at(parent);
            n.cumulative_length = tree.node(parent).cumulative_length + n.length_to_parent;
            n.width = net.edge_width(parent, id);
            tree.nodes[id] = n;
            tree.node(parent).children.push_back(id);
        }
    }
    for (auto& [id, n] : tree.nodes) {
        std::sort(n.children.begin(), n.children.end());
        if (n.children.empty()) tree.leaves.insert(id);
    }
    return tree;
}

PassageWindow passage_window(const PathTree& tree, int node, double v_min, double v_max,
                             double departure_offset) {
    if (!(v_min > 0.0) || !(v_max >= v_min)) {
        throw ConfigError("passage window requires 0 < v_min <= v_max");
    }
    double len = tree.node(node).cumulative_length;
    PassageWindow w;
    w.t_start = departure_offset + len / v_max;
    w.t_end = departure_offset + len / v_min;
    // Computed offset-free so translated windows keep the exact same width.
    w.delta = len / v_min - len / v_max;
    return w;
}

double node_weight_fraction(const PathTree& tree, int node, double t0, double t1) {
    if (!(t0 < t1)) throw ConfigError("node_weight_fraction requires t0 < t1");
    double total = 0.0;
    for (const WeightEntry& e : tree.node(node).weight) {
        double len = e.t_end - e.t_start;
        if (len <= 0.0) {
            // Instantaneous passage: the whole wave arrives at t_start.
            if (t0 < e.t_start && e.t_start < t1) total += e.fraction;
            continue;
        }
        double overlap = std::min(t1, e.t_end) - std::max(t0, e.t_start);
        if (overlap > 0.0) total += e.fraction * overlap / len;
    }
    return total;
}

}  // namespace campussim
