#include "campussim/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace campussim {

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

RoadNetwork::RoadNetwork(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges,
                         std::map<std::string, NamedLocation> locations)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), locations_(std::move(locations)) {
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (!index_of_.emplace(nodes_[i].id, static_cast<int>(i)).second) {
            throw ConfigError("nodes: duplicate node id " + std::to_string(nodes_[i].id));
        }
    }
    build_adjacency();
    validate();
}

int RoadNetwork::index_of(int id) const {
    auto it = index_of_.find(id);
    if (it == index_of_.end()) {
        throw ConfigError("unknown node id " + std::to_string(id));
    }
    return it->second;
}

const NamedLocation& RoadNetwork::location(const std::string& name) const {
    auto it = locations_.find(name);
    if (it == locations_.end()) {
        throw ConfigError("unknown location '" + name + "'");
    }
    return it->second;
}

void RoadNetwork::build_adjacency() {
    adjacency_.assign(nodes_.size(), {});
    for (size_t e = 0; e < edges_.size(); ++e) {
        const RoadEdge& edge = edges_[e];
        auto ia = index_of_.find(edge.a);
        auto ib = index_of_.find(edge.b);
        if (ia == index_of_.end() || ib == index_of_.end()) {
            throw ConfigError("edges[" + std::to_string(e) + "]: references unknown node id " +
                              std::to_string(ia == index_of_.end() ? edge.a : edge.b));
        }
        adjacency_[ia->second].push_back({edge.b, edge.length_m, edge.width_m});
        adjacency_[ib->second].push_back({edge.a, edge.length_m, edge.width_m});
    }
    // Deterministic neighbor order regardless of edge order in the file.
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end(),
                  [](const Neighbor& l, const Neighbor& r) { return l.node_id < r.node_id; });
    }
}

void RoadNetwork::validate() const {
    for (size_t e = 0; e < edges_.size(); ++e) {
        if (!(edges_[e].length_m > 0.0)) {
            throw ConfigError("edges[" + std::to_string(e) + "].length_m: must be > 0, got " +
                              std::to_string(edges_[e].length_m));
        }
        if (!(edges_[e].width_m > 0.0)) {
            throw ConfigError("edges[" + std::to_string(e) + "].width_m: must be > 0, got " +
                              std::to_string(edges_[e].width_m));
        }
    }
    for (const auto& [name, loc] : locations_) {
        if (!has_node(loc.node)) {
            throw ConfigError("locations." + name + ".node: unknown node id " +
                              std::to_string(loc.node));
        }
    }
    // All named locations must be mutually reachable.
    if (locations_.size() > 1) {
        int start = locations_.begin()->second.node;
        std::set<int> seen{start};
        std::queue<int> frontier;
        frontier.push(start);
        while (!frontier.empty()) {
            int v = frontier.front();
            frontier.pop();
            for (const Neighbor& n : adjacency_[index_of_.at(v)]) {
                if (seen.insert(n.node_id).second) frontier.push(n.node_id);
            }
        }
        for (const auto& [name, loc] : locations_) {
            if (!seen.count(loc.node)) {
                throw ConfigError("locations." + name + ": node " + std::to_string(loc.node) +
                                  " is not connected to the other named locations");
            }
        }
    }
}

double RoadNetwork::edge_width(int a, int b) const {
    for (const Neighbor& n : adjacency_[index_of(a)]) {
        if (n.node_id == b) return n.width_m;
    }
    throw ConfigError("no edge between node " + std::to_string(a) + " and " + std::to_string(b));
}

RoadNetwork::SourceTree RoadNetwork::source_tree(int origin) const {
    index_of(origin);  // existence check

    const double inf = std::numeric_limits<double>::infinity();
    std::map<int, double> dist;
    for (const RoadNode& n : nodes_) dist[n.id] = inf;
    dist[origin] = 0.0;

    // (distance, node id): id in the key makes pop order deterministic.
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.push({0.0, origin});
    std::vector<int> settle_order;
    std::set<int> settled;
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (settled.count(v)) continue;
        settled.insert(v);
        settle_order.push_back(v);
        for (const Neighbor& n : adjacency_[index_of_.at(v)]) {
            double cand = d + n.length_m;
            if (cand < dist[n.node_id]) {
                dist[n.node_id] = cand;
                heap.push({cand, n.node_id});
            }
        }
    }

    // Canonical parents: settle order, pick the predecessor whose root path
    // extended by this node compares lexicographically smallest.
    std::map<int, int> parent;
    std::map<int, std::vector<int>> root_path;
    for (const RoadNode& n : nodes_) parent[n.id] = -2;
    parent[origin] = -1;
    root_path[origin] = {origin};
    for (int v : settle_order) {
        if (v == origin) continue;
        std::vector<int> best;
        int best_parent = -2;
        for (const Neighbor& n : adjacency_[index_of_.at(v)]) {
            auto it = root_path.find(n.node_id);
            if (it == root_path.end()) continue;
            if (dist[n.node_id] + n.length_m == dist[v]) {
                std::vector<int> cand = it->second;
                cand.push_back(v);
                if (best_parent == -2 || cand < best) {
                    best = std::move(cand);
                    best_parent = n.node_id;
                }
            }
        }
        if (best_parent != -2) {
            parent[v] = best_parent;
            root_path[v] = std::move(best);
        }
    }
    return SourceTree{origin, std::move(dist), std::move(parent)};
}

std::vector<int> RoadNetwork::shortest_path(int from, int to) const {
    index_of(from);
    index_of(to);
    if (from == to) return {from};
    SourceTree tree = source_tree(from);
    if (tree.parent.at(to) == -2) {
        throw ConfigError("node " + std::to_string(to) + " is unreachable from node " +
                          std::to_string(from));
    }
    std::vector<int> path;
    for (int v = to; v != -1; v = tree.parent.at(v)) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

double RoadNetwork::path_length(const std::vector<int>& path) const {
    double total = 0.0;
    for (size_t i = 1; i < path.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Neighbor& n : adjacency_[index_of(path[i - 1])]) {
            if (n.node_id == path[i]) best = std::min(best, n.length_m);
        }
        if (!std::isfinite(best)) {
            throw ConfigError("path step " + std::to_string(path[i - 1]) + "->" +
                              std::to_string(path[i]) + " has no edge");
        }
        total += best;
    }
    return total;
}

namespace {

int line_of_offset(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

nlohmann::json parse_json_or_throw(const std::string& text, const std::string& origin_name) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(origin_name + ":" + std::to_string(line_of_offset(text, e.byte)) +
                          ": " + e.what());
    }
}

}  // namespace

RoadNetwork RoadNetwork::from_json_text(const std::string& text, const std::string& origin_name) {
    nlohmann::json j = parse_json_or_throw(text, origin_name);
    if (!j.is_object()) throw ConfigError(origin_name + ": top level must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "nodes" && key != "edges" && key != "locations") {
            throw ConfigError(origin_name + ": unknown key '" + key + "'");
        }
    }
    if (!j.contains("nodes") || !j.contains("edges") || !j.contains("locations")) {
        throw ConfigError(origin_name + ": requires keys nodes, edges, locations");
    }

    std::vector<RoadNode> nodes;
    std::map<int, Vec2> pos_by_id;
    for (size_t i = 0; i < j["nodes"].size(); ++i) {
        const auto& n = j["nodes"][i];
        std::string at = "nodes[" + std::to_string(i) + "]";
        for (const auto& [key, _] : n.items()) {
            if (key != "id" && key != "x" && key != "y") {
                throw ConfigError(at + ": unknown key '" + key + "'");
            }
        }
        if (!n.contains("id") || !n["id"].is_number_integer()) {
            throw ConfigError(at + ".id: required integer");
        }
        if (!n.contains("x") || !n.contains("y") || !n["x"].is_number() || !n["y"].is_number()) {
            throw ConfigError(at + ": requires numeric x and y");
        }
        RoadNode node{n["id"].get<int>(), {n["x"].get<double>(), n["y"].get<double>()}};
        nodes.push_back(node);
        pos_by_id[node.id] = node.pos;
    }

    std::vector<RoadEdge> edges;
    for (size_t i = 0; i < j["edges"].size(); ++i) {
        const auto& e = j["edges"][i];
        std::string at = "edges[" + std::to_string(i) + "]";
        for (const auto& [key, _] : e.items()) {
            if (key != "a" && key != "b" && key != "length_m" && key != "width_m") {
                throw ConfigError(at + ": unknown key '" + key + "'");
            }
        }
        if (!e.contains("a") || !e.contains("b") || !e.contains("width_m")) {
            throw ConfigError(at + ": requires a, b, width_m");
        }
        RoadEdge edge;
        edge.a = e["a"].get<int>();
        edge.b = e["b"].get<int>();
        edge.width_m = e["width_m"].get<double>();
        if (e.contains("length_m")) {
            edge.length_m = e["length_m"].get<double>();
        } else {
            if (!pos_by_id.count(edge.a) || !pos_by_id.count(edge.b)) {
                int missing = pos_by_id.count(edge.a) ? edge.b : edge.a;
                throw ConfigError(at + ": unknown node id " + std::to_string(missing));
            }
            edge.length_m = distance(pos_by_id[edge.a], pos_by_id[edge.b]);
        }
        edges.push_back(edge);
    }

    std::map<std::string, NamedLocation> locations;
    for (const auto& [name, spec] : j["locations"].items()) {
        std::string at = "locations." + name;
        NamedLocation loc;
        loc.name = name;
        if (spec.is_number_integer()) {
            loc.node = spec.get<int>();
        } else if (spec.is_object()) {
            for (const auto& [key, _] : spec.items()) {
                if (key != "node" && key != "capacity") {
                    throw ConfigError(at + ": unknown key '" + key + "'");
                }
            }
            if (!spec.contains("node")) throw ConfigError(at + ".node: required");
            loc.node = spec["node"].get<int>();
            if (spec.contains("capacity")) loc.capacity = spec["capacity"].get<int>();
        } else {
            throw ConfigError(at + ": must be a node id or an object");
        }
        locations[name] = loc;
    }

    try {
        return RoadNetwork(std::move(nodes), std::move(edges), std::move(locations));
    } catch (const ConfigError& e) {
        throw ConfigError(origin_name + ": " + e.what());
    }
}

RoadNetwork RoadNetwork::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open map file");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path);
}

}  // namespace campussim
