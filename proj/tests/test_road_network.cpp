#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"

#include "campussim/rng.hpp"
#include "campussim/road_network.hpp"

using namespace campussim;

namespace {

RoadNetwork grid_net(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges,
                     std::map<std::string, NamedLocation> locations = {}) {
    if (locations.empty()) {
        locations["a"] = {"a", nodes.front().id, 0};
        locations["b"] = {"b", nodes.back().id, 0};
    }
    return RoadNetwork(std::move(nodes), std::move(edges), std::move(locations));
}

// Exhaustive simple-path enumeration, usable on graphs of <= 8 nodes.
void enumerate_paths(const RoadNetwork& net, int at, int to, std::vector<int>& current,
                     std::set<int>& seen, double length,
                     std::vector<std::pair<double, std::vector<int>>>& out) {
    if (at == to) {
        out.push_back({length, current});
        return;
    }
    for (const auto& nbr : net.neighbors_of(at)) {
        if (seen.count(nbr.node_id)) continue;
        seen.insert(nbr.node_id);
        current.push_back(nbr.node_id);
        enumerate_paths(net, nbr.node_id, to, current, seen, length + nbr.length_m, out);
        current.pop_back();
        seen.erase(nbr.node_id);
    }
}

std::vector<std::pair<double, std::vector<int>>> all_paths(const RoadNetwork& net, int from,
                                                           int to) {
    std::vector<std::pair<double, std::vector<int>>> out;
    std::vector<int> current{from};
    std::set<int> seen{from};
    enumerate_paths(net, from, to, current, seen, 0.0, out);
    return out;
}

}  // namespace

TEST_CASE("shortest path: identity and single edge") {
    RoadNetwork net = grid_net({{1, {0, 0}}, {2, {10, 0}}}, {{1, 2, 10.0, 5.0}});
    CHECK(net.shortest_path(1, 1) == std::vector<int>{1});
    CHECK(net.path_length(net.shortest_path(1, 1)) == 0.0);
    CHECK(net.shortest_path(1, 2) == std::vector<int>{1, 2});
    CHECK(net.path_length(net.shortest_path(1, 2)) == doctest::Approx(10.0));
}

TEST_CASE("shortest path beats a shorter-hop detour when total length wins") {
    // 1-2-3-5 (3 edges, total 12) vs 1-4-5 (2 edges, total 20).
    RoadNetwork net = grid_net(
        {{1, {0, 0}}, {2, {4, 0}}, {3, {8, 0}}, {4, {0, 10}}, {5, {12, 0}}},
        {{1, 2, 4.0, 5.0}, {2, 3, 4.0, 5.0}, {3, 5, 4.0, 5.0}, {1, 4, 10.0, 5.0},
         {4, 5, 10.0, 5.0}});
    auto path = net.shortest_path(1, 5);
    auto enumerated = all_paths(net, 1, 5);
    double best = std::min_element(enumerated.begin(), enumerated.end())->first;
    CHECK(net.path_length(path) == doctest::Approx(best));
    CHECK(path == std::vector<int>{1, 2, 3, 5});
}

TEST_CASE("shortest path matches exhaustive enumeration on random small graphs") {
    // Deterministically generated graphs with integer lengths.
    Substream rng(7, StreamId::Setup);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 4 + static_cast<int>(rng.uniform_index(5));  // 4..8 nodes
        std::vector<RoadNode> nodes;
        for (int i = 0; i < n; ++i) {
            nodes.push_back({i, {double(i * 3 % 7), double(i * 5 % 11)}});
        }
        std::vector<RoadEdge> edges;
        for (int i = 1; i < n; ++i) {
            int j = static_cast<int>(rng.uniform_index(i));
            edges.push_back({j, i, double(1 + rng.uniform_index(9)), 5.0});
        }
        for (int extra = 0; extra < n / 2; ++extra) {
            int a = static_cast<int>(rng.uniform_index(n));
            int b = static_cast<int>(rng.uniform_index(n));
            if (a == b) continue;
            edges.push_back({a, b, double(1 + rng.uniform_index(9)), 5.0});
        }
        RoadNetwork net = grid_net(std::move(nodes), std::move(edges));

        auto path = net.shortest_path(0, n - 1);
        auto enumerated = all_paths(net, 0, n - 1);
        REQUIRE(!enumerated.empty());
        double best = enumerated[0].first;
        for (const auto& [len, _] : enumerated) best = std::min(best, len);
        CHECK(net.path_length(path) == doctest::Approx(best));

        // Tie-break: lexicographically smallest among the equal-length paths.
        std::vector<std::vector<int>> winners;
        for (const auto& [len, p] : enumerated) {
            if (len == doctest::Approx(best)) winners.push_back(p);
        }
        std::sort(winners.begin(), winners.end());
        CHECK(path == winners.front());
    }
}

TEST_CASE("unknown nodes and unreachable destinations are errors") {
    RoadNetwork net = grid_net({{1, {0, 0}}, {2, {1, 0}}}, {{1, 2, 1.0, 3.0}});
    CHECK_THROWS_AS(net.shortest_path(1, 9), ConfigError);
    CHECK_THROWS_AS((void)RoadNetwork({{1, {0, 0}}, {2, {1, 0}}, {3, {9, 9}}},
                                      {{1, 2, 1.0, 3.0}},
                                      {{"a", {"a", 1, 0}}, {"b", {"b", 3, 0}}}),
                    ConfigError);
}

TEST_CASE("network invariants rejected at construction") {
    CHECK_THROWS_AS((void)RoadNetwork({{1, {0, 0}}, {1, {1, 1}}}, {}, {}), ConfigError);
    CHECK_THROWS_AS((void)RoadNetwork({{1, {0, 0}}, {2, {1, 0}}}, {{1, 2, -3.0, 5.0}}, {}),
                    ConfigError);
    CHECK_THROWS_AS((void)RoadNetwork({{1, {0, 0}}, {2, {1, 0}}}, {{1, 2, 3.0, 0.0}}, {}),
                    ConfigError);
    CHECK_THROWS_AS((void)RoadNetwork({{1, {0, 0}}}, {{1, 7, 3.0, 1.0}}, {}), ConfigError);
}

TEST_CASE("map loader: valid file, derived lengths, diagnostics") {
    const char* good = R"({
        "nodes": [{"id": 1, "x": 0, "y": 0}, {"id": 2, "x": 30, "y": 40}],
        "edges": [{"a": 1, "b": 2, "width_m": 5}],
        "locations": {"dormitory_1": {"node": 1}, "restaurant": {"node": 2, "capacity": 100}}
    })";
    RoadNetwork net = RoadNetwork::from_json_text(good, "good.json");
    CHECK(net.edges()[0].length_m == doctest::Approx(50.0));  // from coordinates
    CHECK(net.location("restaurant").capacity == 100);

    CHECK_THROWS_WITH_AS(
        (void)RoadNetwork::from_json_text(R"({"nodes": [], "edges": [], "locations": {},
                                              "bogus": 1})",
                                          "m.json"),
        doctest::Contains("unknown key 'bogus'"), ConfigError);

    // Syntax errors carry the line number.
    CHECK_THROWS_WITH_AS((void)RoadNetwork::from_json_text("{\n  \"nodes\": [\n  oops\n", "m.json"),
                         doctest::Contains("m.json:3"), ConfigError);

    CHECK_THROWS_WITH_AS(
        (void)RoadNetwork::from_json_text(R"({
            "nodes": [{"id": 1, "x": 0, "y": 0}],
            "edges": [{"a": 1, "b": 5, "width_m": 2}],
            "locations": {}
        })",
                                          "m.json"),
        doctest::Contains("unknown node id 5"), ConfigError);
}
