#include "campussim/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace campussim {

CongestionModel::CongestionModel(std::vector<Flow> flows, std::vector<std::string> group_names,
                                 double v_min, double v_max, double reference_width_m)
    : flows_(std::move(flows)), group_names_(std::move(group_names)) {
    if (!(v_min > 0.0) || !(v_max >= v_min)) {
        throw ConfigError("congestion model requires 0 < v_min <= v_max");
    }
    for (const Flow& f : flows_) {
        if (f.offset_group < 0 || f.offset_group >= group_count()) {
            throw ConfigError("congestion flow '" + f.origin_name + "' has no offset group");
        }
    }

    // Collect per-node terms; a node matters only when two different groups
    // route through it with a positive passage window.
    std::map<int, std::vector<Term>> by_node;
    for (const Flow& f : flows_) {
        for (const auto& [id, node] : f.tree.nodes) {
            if (node.weight.empty()) continue;
            PassageWindow w = passage_window(f.tree, id, v_min, v_max, 0.0);
            if (!(w.delta > 0.0)) continue;  // the origin itself: no crowd window
            double fraction = 0.0;
            for (const WeightEntry& e : node.weight) fraction += e.fraction;
            if (fraction <= 0.0) continue;
            double width_scale = node.width > 0.0 ? reference_width_m / node.width : 1.0;
            by_node[id].push_back({f.offset_group, w.t_start, w.t_end,
                                   fraction / w.delta * width_scale});
        }
    }
    for (auto& [id, terms] : by_node) {
        std::set<int> groups;
        for (const Term& t : terms) groups.insert(t.group);
        if (groups.size() >= 2) terms_per_node_.push_back(std::move(terms));
    }
}

double CongestionModel::congestion(std::span<const double> group_offsets) const {
    if (static_cast<int>(group_offsets.size()) != group_count()) {
        throw ConfigError("congestion: offset count does not match group count");
    }
    double total = 0.0;
    for (const auto& terms : terms_per_node_) {
        for (size_t i = 0; i < terms.size(); ++i) {
            double s_i = terms[i].t0 + group_offsets[terms[i].group];
            double e_i = terms[i].t1 + group_offsets[terms[i].group];
            bool overlaps = false;
            for (size_t j = 0; j < terms.size() && !overlaps; ++j) {
                if (terms[j].group == terms[i].group) continue;
                double s_j = terms[j].t0 + group_offsets[terms[j].group];
                double e_j = terms[j].t1 + group_offsets[terms[j].group];
                overlaps = std::max(s_i, s_j) < std::min(e_i, e_j);
            }
            if (overlaps) total += terms[i].value;
        }
    }
    return total;
}

namespace {

struct Candidate {
    double congestion;
    double total_offset;
    std::vector<double> offsets;

    bool better_than(const Candidate& other) const {
        if (congestion != other.congestion) return congestion < other.congestion;
        if (total_offset != other.total_offset) return total_offset < other.total_offset;
        return offsets < other.offsets;
    }
};

Candidate evaluate(const CongestionModel& model, std::vector<double> offsets) {
    double c = model.congestion(offsets);
    double sum = 0.0;
    for (double v : offsets) sum += v;
    return {c, sum, std::move(offsets)};
}

}  // namespace

StaggerResult optimize_stagger(const CongestionModel& model, double step_s, double max_offset_s) {
    if (!(step_s > 0.0) || !(max_offset_s >= 0.0)) {
        throw ConfigError("optimize_stagger: requires step > 0 and max_offset >= 0");
    }
    int groups = model.group_count();
    int levels = static_cast<int>(std::floor(max_offset_s / step_s + 1e-9)) + 1;
    StaggerResult result;
    if (groups == 0) return result;
    if (groups == 1) {
        result.group_offsets = {0.0};
        result.congestion = model.congestion(result.group_offsets);
        result.fully_separated = result.congestion == 0.0;
        return result;
    }

    Candidate best;
    if (groups <= 6) {
        // Exhaustive grid, parallel over the first group's level.
        std::vector<Candidate> per_first(levels, Candidate{0, 0, {}});
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int first = 0; first < levels; ++first) {
            std::vector<double> offsets(groups, 0.0);
            offsets[0] = first * step_s;
            Candidate local{0, 0, {}};
            bool have = false;
            std::vector<int> idx(groups, 0);
            while (true) {
                for (int g = 1; g < groups; ++g) offsets[g] = idx[g] * step_s;
                Candidate cand = evaluate(model, offsets);
                if (!have || cand.better_than(local)) {
                    local = std::move(cand);
                    have = true;
                }
                int g = groups - 1;
                while (g >= 1 && ++idx[g] == levels) {
                    idx[g] = 0;
                    --g;
                }
                if (g < 1) break;
            }
            per_first[first] = std::move(local);
        }
        best = per_first[0];
        for (int first = 1; first < levels; ++first) {
            if (per_first[first].better_than(best)) best = per_first[first];
        }
    } else {
        // Coordinate descent from the all-zero schedule, sweeping until no
        // single-group move improves.
        best = evaluate(model, std::vector<double>(groups, 0.0));
        bool improved = true;
        while (improved) {
            improved = false;
            for (int g = 0; g < groups; ++g) {
                for (int level = 0; level < levels; ++level) {
                    std::vector<double> offsets = best.offsets;
                    offsets[g] = level * step_s;
                    Candidate cand = evaluate(model, std::move(offsets));
                    if (cand.better_than(best)) {
                        best = std::move(cand);
                        improved = true;
                    }
                }
            }
        }
    }

    // Offsets are only meaningful relative to each other; slide the schedule
    // so the earliest group departs at zero (also minimizes the total).
    double min_off = *std::min_element(best.offsets.begin(), best.offsets.end());
    if (min_off > 0.0) {
        for (double& v : best.offsets) v -= min_off;
        best = evaluate(model, best.offsets);
    }

    result.group_offsets = best.offsets;
    result.congestion = best.congestion;
    result.fully_separated = best.congestion == 0.0;
    return result;
}

}  // namespace campussim
