#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "campussim/agent.hpp"
#include "campussim/road_network.hpp"

namespace campussim {

// Indoor micro-layout: occupants of a square room sit on a grid. The grid
// dimension follows the larger of nominal capacity and actual occupancy, so
// crowding a room past capacity packs seats tighter, and seating half a
// cohort on the capacity grid in spread order doubles the free space around
// each seat.
struct VenueSpec {
    std::string pattern;        // location name, trailing '*' wildcard allowed
    int rooms = 0;              // 0 = create ceil(occupants/capacity) rooms
    int room_capacity = 4;
    double room_side_m = 3.0;
    bool arrival_seating = false;  // seats taken in arrival order (restaurants)
    bool spread_seating = false;   // arrival venues: fill spread seats first

    void validate() const {
        if (room_capacity < 1) throw ConfigError("venue.room_capacity: must be >= 1");
        if (!(room_side_m > 0.0)) throw ConfigError("venue.room_side_m: must be > 0");
        if (rooms < 0) throw ConfigError("venue.rooms: must be >= 0");
    }
};

class RoomLayout {
public:
    RoomLayout() = default;
    RoomLayout(int capacity, int occupancy, double side_m, bool spread_order)
        : side_(side_m) {
        int want = std::max(capacity, std::max(occupancy, 1));
        grid_ = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(want))));
        pitch_ = side_ / grid_;
        order_.reserve(static_cast<size_t>(grid_) * grid_);
        if (spread_order) {
            // Checkerboard-first enumeration: the first half of the seats
            // keeps diagonal spacing between occupants.
            for (int parity = 0; parity <= 1; ++parity) {
                for (int r = 0; r < grid_; ++r) {
                    for (int c = 0; c < grid_; ++c) {
                        if ((r + c) % 2 == parity) order_.push_back(r * grid_ + c);
                    }
                }
            }
        } else {
            for (int k = 0; k < grid_ * grid_; ++k) order_.push_back(k);
        }
    }

    int seat_count() const { return grid_ * grid_; }
    double pitch() const { return pitch_; }

    // Local room coordinates of the k-th seat in enumeration order. Indices
    // past the grid extend it with extra rows at the same pitch.
    Vec2 seat_xy(int k) const {
        int cell = k < static_cast<int>(order_.size()) ? order_[static_cast<size_t>(k)] : k;
        int r = cell / grid_;
        int c = cell % grid_;
        return {(c + 0.5) * pitch_, (r + 0.5) * pitch_};
    }

private:
    int grid_ = 1;
    double side_ = 1.0;
    double pitch_ = 1.0;
    std::vector<int> order_;
};

// One physical room at simulation time. Context ids separate rooms from each
// other and from the road plane.
struct Room {
    int context = 0;
    RoomLayout layout;
    // Arrival seating only: seat -> agent id (-1 free).
    std::vector<int> occupant;

    int take_lowest_free_seat(int agent_id) {
        for (size_t s = 0; s < occupant.size(); ++s) {
            if (occupant[s] == -1) {
                occupant[s] = agent_id;
                return static_cast<int>(s);
            }
        }
        occupant.push_back(agent_id);
        return static_cast<int>(occupant.size()) - 1;
    }
    void free_seat(int seat) {
        if (seat >= 0 && seat < static_cast<int>(occupant.size())) occupant[seat] = -1;
    }
};

}  // namespace campussim
