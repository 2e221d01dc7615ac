#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace campussim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Vec2& a, const Vec2& b);

// Thrown by loaders/validators; message carries a field path and, for syntax
// errors, the line in the source file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RoadNode {
    int id = 0;
    Vec2 pos;
};

struct RoadEdge {
    int a = 0;
    int b = 0;
    double length_m = 0.0;
    double width_m = 0.0;
};

struct NamedLocation {
    std::string name;
    int node = 0;
    int capacity = 0;  // 0 = unbounded
};

// Undirected campus road graph. Immutable once built; safe to share across
// replications.
class RoadNetwork {
public:
    RoadNetwork() = default;
    RoadNetwork(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges,
                std::map<std::string, NamedLocation> locations);

    static RoadNetwork load_file(const std::string& path);
    static RoadNetwork from_json_text(const std::string& text, const std::string& origin_name);

    const std::vector<RoadNode>& nodes() const { return nodes_; }
    const std::vector<RoadEdge>& edges() const { return edges_; }
    const std::map<std::string, NamedLocation>& locations() const { return locations_; }

    bool has_node(int id) const { return index_of_.count(id) > 0; }
    int index_of(int id) const;
    const RoadNode& node(int id) const { return nodes_[index_of(id)]; }
    const NamedLocation& location(const std::string& name) const;
    bool has_location(const std::string& name) const { return locations_.count(name) > 0; }

    struct Neighbor {
        int node_id;
        double length_m;
        double width_m;
    };
    const std::vector<Neighbor>& neighbors_of(int id) const { return adjacency_[index_of(id)]; }

    // Minimal-total-length path between two nodes, both endpoints included.
    // Equal-length ties break toward the lexicographically smallest node-id
    // sequence, so repeated calls and tree construction agree.
    std::vector<int> shortest_path(int from, int to) const;
    double path_length(const std::vector<int>& path) const;

    // Distances and canonical parents of the shortest-path tree rooted at
    // `origin`; parent of an unreachable node is -2, of the origin -1.
    struct SourceTree {
        int origin;
        std::map<int, double> dist;
        std::map<int, int> parent;
    };
    SourceTree source_tree(int origin) const;

    double edge_width(int a, int b) const;

private:
    void build_adjacency();
    void validate() const;

    std::vector<RoadNode> nodes_;
    std::vector<RoadEdge> edges_;
    std::map<std::string, NamedLocation> locations_;
    std::map<int, int> index_of_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

}  // namespace campussim
