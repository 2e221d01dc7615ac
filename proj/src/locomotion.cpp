#include "campussim/locomotion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace campussim {

ActivePath make_active_path(const RoadNetwork& net, const std::vector<int>& node_path,
                            const LocomotionParams& params, const SpeedModel& speeds,
                            int cohort_rank) {
    ActivePath path;
    path.nodes = node_path;
    path.cum_len_m.resize(node_path.size(), 0.0);
    path.pt_x.resize(node_path.size());
    path.pt_y.resize(node_path.size());
    for (size_t i = 0; i < node_path.size(); ++i) {
        const Vec2& p = net.node(node_path[i]).pos;
        path.pt_x[i] = p.x;
        path.pt_y[i] = p.y;
        if (i > 0) {
            path.cum_len_m[i] = path.cum_len_m[i - 1] +
                                net.path_length({node_path[i - 1], node_path[i]});
        }
    }
    if (node_path.size() > 1) {
        path.lanes.resize(node_path.size() - 1, 1);
        for (size_t s = 0; s + 1 < node_path.size(); ++s) {
            double w = net.edge_width(node_path[s], node_path[s + 1]);
            path.lanes[s] = std::max(1, static_cast<int>(w / params.lane_width_m));
        }
    }
    if (params.spacing_enabled && !path.lanes.empty()) {
        int first_lanes = path.lanes[0];
        path.lane = cohort_rank % first_lanes;
        int rank_in_lane = cohort_rank / first_lanes;
        path.progress_m = -speeds.preferred_spacing_m * rank_in_lane;
    } else {
        path.lane = 0;
        path.progress_m = 0.0;
    }
    path.segment = 0;
    return path;
}

Vec2 path_position(const ActivePath& path, double lane_width_m) {
    if (path.nodes.size() < 2) {
        return path.nodes.empty() ? Vec2{} : Vec2{path.pt_x[0], path.pt_y[0]};
    }
    size_t s = static_cast<size_t>(std::clamp(path.segment, 0, static_cast<int>(path.nodes.size()) - 2));
    double seg_len = path.cum_len_m[s + 1] - path.cum_len_m[s];
    double t = seg_len > 0.0 ? (path.progress_m - path.cum_len_m[s]) / seg_len : 0.0;
    if (path.progress_m >= path.total_length_m()) t = 1.0;
    double dx = path.pt_x[s + 1] - path.pt_x[s];
    double dy = path.pt_y[s + 1] - path.pt_y[s];
    double x = path.pt_x[s] + t * dx;
    double y = path.pt_y[s] + t * dy;
    double norm = std::hypot(dx, dy);
    if (norm > 0.0) {
        int lanes = path.lanes.empty() ? 1 : path.lanes[s];
        int lane = path.lane % lanes;
        double offset = (lane - (lanes - 1) * 0.5) * lane_width_m;
        x += (-dy / norm) * offset;
        y += (dx / norm) * offset;
    }
    return {x, y};
}

namespace {

struct MoverOrder {
    uint64_t key;      // directed segment + lane
    double progress;
    int agent_id;
    int slot;          // index into mover_ids
};

uint64_t order_key(const ActivePath& p) {
    size_t s = static_cast<size_t>(std::clamp(p.segment, 0, std::max(0, static_cast<int>(p.nodes.size()) - 2)));
    uint64_t a = static_cast<uint32_t>(p.nodes[s]);
    uint64_t b = s + 1 < p.nodes.size() ? static_cast<uint32_t>(p.nodes[s + 1]) : 0u;
    int lanes = p.lanes.empty() ? 1 : p.lanes[s];
    uint64_t lane = static_cast<uint32_t>(p.lane % lanes);
    return (a << 40) ^ (b << 16) ^ lane;
}

}  // namespace

std::vector<int> step_locomotion(std::span<Agent> agents, const std::vector<int>& mover_ids,
                                 const LocomotionParams& params, const SpeedModel& speeds,
                                 bool parallel) {
    const int n = static_cast<int>(mover_ids.size());
    // Leader lookup runs against the previous step's progress values.
    std::vector<MoverOrder> order;
    std::vector<int> leader_of;  // slot -> leader agent id (-1 none)
    std::vector<double> leader_progress;
    leader_of.assign(n, -1);
    leader_progress.assign(n, 0.0);
    if (params.spacing_enabled) {
        order.reserve(n);
        for (int slot = 0; slot < n; ++slot) {
            const Agent& a = agents[mover_ids[slot]];
            order.push_back({order_key(a.path), a.path.progress_m, a.id, slot});
        }
        std::sort(order.begin(), order.end(), [](const MoverOrder& l, const MoverOrder& r) {
            if (l.key != r.key) return l.key < r.key;
            if (l.progress != r.progress) return l.progress < r.progress;
            return l.agent_id < r.agent_id;
        });
        for (size_t i = 0; i + 1 < order.size(); ++i) {
            if (order[i].key == order[i + 1].key) {
                leader_of[order[i].slot] = order[i + 1].agent_id;
                leader_progress[order[i].slot] = order[i + 1].progress;
            }
        }
    }

    std::vector<uint8_t> arrived(n, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && n > 64)
#endif
    for (int slot = 0; slot < n; ++slot) {
        Agent& a = agents[mover_ids[slot]];
        ActivePath& p = a.path;
        double v = a.speed_mps;
        double max_progress = p.total_length_m() + 1.0;
        if (params.spacing_enabled && leader_of[slot] >= 0) {
            double gap = leader_progress[slot] - p.progress_m;
            double hard = speeds.hard_stop_m;
            double pref = speeds.preferred_spacing_m;
            if (gap <= hard) {
                v = 0.0;
            } else if (gap < pref) {
                v *= (gap - hard) / (pref - hard);
            }
            max_progress = leader_progress[slot] - hard;
        }
        double next = std::min(p.progress_m + v * params.dt_s, max_progress);
        p.progress_m = std::max(p.progress_m, next);
        while (p.segment + 2 < static_cast<int>(p.nodes.size()) &&
               p.progress_m >= p.cum_len_m[p.segment + 1]) {
            ++p.segment;
        }
        Vec2 world = path_position(p, params.lane_width_m);
        a.pos = {kRoadContext, world.x, world.y};
        if (p.finished()) arrived[slot] = 1;
    }

    std::vector<int> done;
    for (int slot = 0; slot < n; ++slot) {
        if (arrived[slot]) done.push_back(mover_ids[slot]);
    }
    std::sort(done.begin(), done.end());
    return done;
}

}  // namespace campussim
