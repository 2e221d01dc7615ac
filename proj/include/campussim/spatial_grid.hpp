#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "campussim/agent.hpp"

namespace campussim {

// Uniform hash grid over (context, x, y) positions for radius queries.
// Buckets keep insertion order, so building it from agents in id order makes
// every neighbor enumeration (and any float reduction over it) reproducible.
class SpatialGrid {
public:
    SpatialGrid() = default;
    // `include` marks which indices participate (e.g. skips isolated agents).
    SpatialGrid(std::span<const PlacedPosition> positions, double cell_size,
                std::span<const uint8_t> include = {});

    void rebuild(std::span<const PlacedPosition> positions, double cell_size,
                 std::span<const uint8_t> include = {});

    // Calls fn(index, distance) for every included position within `radius`
    // of `p` (same context, distance <= radius), excluding `self`.
    template <typename F>
    void for_neighbors(const PlacedPosition& p, double radius, int self, F&& fn) const {
        if (cell_size_ <= 0.0) return;
        int span = static_cast<int>(radius / cell_size_) + 1;
        int cx = cell_of(p.x);
        int cy = cell_of(p.y);
        double r2 = radius * radius;
        for (int dy = -span; dy <= span; ++dy) {
            for (int dx = -span; dx <= span; ++dx) {
                auto it = cells_.find(key(p.context, cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (int j : it->second) {
                    if (j == self) continue;
                    const PlacedPosition& q = positions_[j];
                    double ddx = q.x - p.x;
                    double ddy = q.y - p.y;
                    double d2 = ddx * ddx + ddy * ddy;
                    if (d2 <= r2) fn(j, std::sqrt(d2));
                }
            }
        }
    }

    std::vector<std::pair<int, double>> neighbors_of(int index, double radius) const;

    size_t size() const { return positions_.size(); }

private:
    int cell_of(double v) const { return static_cast<int>(std::floor(v / cell_size_)); }
    static uint64_t key(int context, int cx, int cy) {
        uint64_t h = static_cast<uint64_t>(static_cast<uint32_t>(context));
        h = h * 0x9e3779b97f4a7c15ULL + static_cast<uint32_t>(cx);
        h = h * 0x9e3779b97f4a7c15ULL + static_cast<uint32_t>(cy);
        return h;
    }

    std::vector<PlacedPosition> positions_;
    std::unordered_map<uint64_t, std::vector<int>> cells_;
    double cell_size_ = 0.0;
};

}  // namespace campussim
