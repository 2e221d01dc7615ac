#pragma once

#include <map>
#include <set>
#include <vector>

#include "campussim/road_network.hpp"

namespace campussim {

// Earliest/latest arrival interval of a crowd at a tree node, assuming the
// crowd departs together and spreads only by walking-speed differences.
struct PassageWindow {
    double t_start = 0.0;
    double t_end = 0.0;
    double delta = 0.0;
};

// One crowd wave through a node: the passage interval and the fraction of
// the total population that routes through the node during it.
struct WeightEntry {
    double t_start = 0.0;
    double t_end = 0.0;
    double fraction = 0.0;
};

struct TreeNode {
    int id = 0;
    int parent = -1;  // -1 at the root
    std::vector<int> children;
    double length_to_parent = 0.0;
    double cumulative_length = 0.0;  // along the tree from the root
    double width = 0.0;              // of the edge toward the parent; 0 at the root
    std::vector<WeightEntry> weight;
};

// Union of shortest paths from one origin to a set of destinations. Shared
// prefixes appear once; acyclic by construction.
struct PathTree {
    int root = 0;
    std::map<int, TreeNode> nodes;
    std::set<int> leaves;

    bool contains(int id) const { return nodes.count(id) > 0; }
    const TreeNode& node(int id) const;
    TreeNode& node(int id);
    // Root-to-node id sequence.
    std::vector<int> path_from_root(int id) const;
};

PathTree build_path_tree(const RoadNetwork& net, int origin, const std::set<int>& destinations);

PassageWindow passage_window(const PathTree& tree, int node, double v_min, double v_max,
                             double departure_offset);

// Fraction of the origin population whose passage through `node` overlaps
// (t0, t1), with arrivals spread uniformly over each weight entry's window.
double node_weight_fraction(const PathTree& tree, int node, double t0, double t1);

}  // namespace campussim
