#include "campussim/spatial_grid.hpp"

#include <algorithm>
#include <cmath>

namespace campussim {

SpatialGrid::SpatialGrid(std::span<const PlacedPosition> positions, double cell_size,
                         std::span<const uint8_t> include) {
    rebuild(positions, cell_size, include);
}

void SpatialGrid::rebuild(std::span<const PlacedPosition> positions, double cell_size,
                          std::span<const uint8_t> include) {
    positions_.assign(positions.begin(), positions.end());
    cell_size_ = cell_size;
    cells_.clear();
    cells_.reserve(positions.size());
    for (size_t i = 0; i < positions_.size(); ++i) {
        if (!include.empty() && !include[i]) continue;
        const PlacedPosition& p = positions_[i];
        cells_[key(p.context, cell_of(p.x), cell_of(p.y))].push_back(static_cast<int>(i));
    }
}

std::vector<std::pair<int, double>> SpatialGrid::neighbors_of(int index, double radius) const {
    std::vector<std::pair<int, double>> out;
    for_neighbors(positions_[index], radius, index,
                  [&](int j, double d) { out.emplace_back(j, d); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace campussim
