#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "campussim/path_tree.hpp"

namespace campussim {

// Planning model behind staggered travel. Each departure place contributes a
// path tree annotated with how much of the total population flows through
// each node and how wide that node's passage window is; the objective sums
// weight-over-window at nodes where flows from different places overlap in
// time. Narrow roads count more via the width scale.
class CongestionModel {
public:
    struct Flow {
        std::string origin_name;
        int offset_group = 0;
        PathTree tree;  // node weights filled: one entry per node, offset 0
    };

    CongestionModel(std::vector<Flow> flows, std::vector<std::string> group_names, double v_min,
                    double v_max, double reference_width_m);

    int group_count() const { return static_cast<int>(group_names_.size()); }
    const std::vector<std::string>& group_names() const { return group_names_; }
    const std::vector<Flow>& flows() const { return flows_; }

    // Eq-style objective: sum of weight/window (width-scaled) over (node,
    // origin) terms whose shifted windows overlap another origin's window at
    // the same node. Offsets are per group, seconds.
    double congestion(std::span<const double> group_offsets) const;

private:
    struct Term {
        int group;
        double t0;       // window at zero offset
        double t1;
        double value;    // weight / delta, width-scaled
    };

    std::vector<Flow> flows_;
    std::vector<std::string> group_names_;
    std::vector<std::vector<Term>> terms_per_node_;  // only nodes shared by >= 2 groups
};

struct StaggerResult {
    std::vector<double> group_offsets;  // seconds, aligned with group_names
    double congestion = 0.0;
    bool fully_separated = false;  // false = some overlap remains (warning)
};

// Minimizes congestion over the offset grid {0, step, .., max_offset} per
// group; ties break toward the smallest total offset, then lexicographically.
// Exhaustive for up to 6 groups, coordinate descent beyond that.
StaggerResult optimize_stagger(const CongestionModel& model, double step_s, double max_offset_s);

}  // namespace campussim
