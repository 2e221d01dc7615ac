#include "campussim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>

#include "campussim/exposure.hpp"
#include "campussim/locomotion.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace campussim {

namespace {

// Rooms for isolated agents: one synthetic context per agent, far away from
// every venue context id.
constexpr int kHospitalContextBase = 1 << 24;

bool is_dorm_name(const std::string& name, const std::string& prefix) {
    return name.rfind(prefix, 0) == 0;
}

}  // namespace

int Simulation::location_index(const std::string& name) const {
    auto it = loc_index_.find(name);
    if (it == loc_index_.end()) throw ConfigError("unknown location '" + name + "'");
    return it->second;
}

Simulation::Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)), net_(cfg_.load_network()) {
    cfg_.validate(net_);
    for (const auto& [name, loc] : net_.locations()) {
        loc_index_[name] = static_cast<int>(loc_names_.size());
        loc_names_.push_back(name);
    }

    // Expand the population plan: per-agent dorm/category/study destination.
    std::vector<PopulationGroup> plan = cfg_.population.groups;
    std::vector<std::string> dorm_names;
    for (const std::string& name : loc_names_) {
        if (is_dorm_name(name, cfg_.population.dormitory_prefix)) dorm_names.push_back(name);
    }
    if (plan.empty()) {
        // Even spread: category counts from the mix, members dealt over the
        // dormitories round-robin.
        int total = cfg_.population.total;
        std::vector<int> cat_count(4, 0);
        double cum = 0.0;
        int assigned = 0;
        for (int c = 0; c < 4; ++c) {
            cum += cfg_.population.category_mix[c];
            int upto = static_cast<int>(std::llround(cum * total));
            cat_count[c] = upto - assigned;
            assigned = upto;
        }
        std::map<std::pair<std::string, int>, int> counts;
        int idx = 0;
        for (int c = 0; c < 4; ++c) {
            for (int k = 0; k < cat_count[c]; ++k, ++idx) {
                counts[{dorm_names[idx % dorm_names.size()], c + 1}] += 1;
            }
        }
        for (const auto& [key, count] : counts) {
            plan.push_back({key.first, key.second, count});
        }
    }

    CategoryRules rules;
    bool timetabled = cfg_.population.itinerary_mode == "timetabled";
    std::vector<int> option_counter(4, 0);
    for (const PopulationGroup& g : plan) {
        int dorm = location_index(g.dormitory);
        for (int k = 0; k < g.count; ++k) {
            PopulationLayout::Member m;
            m.dorm_loc = dorm;
            m.category = g.category;
            if (timetabled) {
                const auto& options = rules.study_options[g.category - 1];
                int pick = option_counter[g.category - 1]++ % static_cast<int>(options.size());
                m.study_loc = location_index(options[pick]);
                std::pair<int, int> key{m.dorm_loc, m.study_loc};
                layout_.dorm_study_counts[key] += 1;
            }
            layout_.members.push_back(m);
        }
    }

    resolve_stagger();
}

CongestionModel Simulation::build_congestion_model(bool morning) const {
    int total = static_cast<int>(layout_.members.size());
    // origin location -> (destination location -> count)
    std::map<int, std::map<int, int>> flows_by_origin;
    for (const auto& [key, count] : layout_.dorm_study_counts) {
        if (morning) {
            flows_by_origin[key.first][key.second] += count;
        } else {
            flows_by_origin[key.second][key.first] += count;
        }
    }

    std::vector<std::string> group_names;
    std::vector<CongestionModel::Flow> flows;
    for (const auto& [origin_loc, dests] : flows_by_origin) {
        const std::string& origin_name = loc_names_[origin_loc];
        std::string group = morning ? origin_name
                                    : postclass_group_of(origin_name,
                                                         cfg_.control.stagger.postclass_separate);
        auto it = std::find(group_names.begin(), group_names.end(), group);
        int group_idx;
        if (it == group_names.end()) {
            group_idx = static_cast<int>(group_names.size());
            group_names.push_back(group);
        } else {
            group_idx = static_cast<int>(it - group_names.begin());
        }

        int origin_node = net_.location(origin_name).node;
        std::set<int> dest_nodes;
        for (const auto& [dest_loc, count] : dests) {
            dest_nodes.insert(net_.location(loc_names_[dest_loc]).node);
        }
        PathTree tree = build_path_tree(net_, origin_node, dest_nodes);

        // Fold per-destination head counts into per-node fractions of the
        // total population, then attach the zero-offset passage interval.
        std::map<int, double> fraction;
        for (const auto& [dest_loc, count] : dests) {
            int dest_node = net_.location(loc_names_[dest_loc]).node;
            for (int node : tree.path_from_root(dest_node)) {
                fraction[node] += static_cast<double>(count) / total;
            }
        }
        for (auto& [node_id, frac] : fraction) {
            PassageWindow w = passage_window(tree, node_id, cfg_.speeds.v_min, cfg_.speeds.v_max, 0.0);
            tree.node(node_id).weight.push_back({w.t_start, w.t_end, frac});
        }
        flows.push_back({origin_name, group_idx, std::move(tree)});
    }
    // Width scale pivots on the widest road so narrow segments count more.
    double ref_width = 0.0;
    for (const RoadEdge& e : net_.edges()) ref_width = std::max(ref_width, e.width_m);
    if (ref_width <= 0.0) ref_width = 1.0;
    return CongestionModel(std::move(flows), std::move(group_names), cfg_.speeds.v_min,
                           cfg_.speeds.v_max, ref_width);
}

CongestionModel Simulation::morning_congestion_model() const { return build_congestion_model(true); }
CongestionModel Simulation::postclass_congestion_model() const { return build_congestion_model(false); }

void Simulation::resolve_stagger() {
    const StaggerPolicy& sp = cfg_.control.stagger;
    if (!sp.enabled) return;
    if (!sp.morning_by_dorm.empty() || !sp.postclass_by_group.empty()) {
        offsets_.morning_by_dorm = sp.morning_by_dorm;
        offsets_.postclass_by_group = sp.postclass_by_group;
        return;
    }
    CongestionModel morning = morning_congestion_model();
    StaggerResult mres = optimize_stagger(morning, sp.step_s, sp.max_offset_s);
    for (int g = 0; g < morning.group_count(); ++g) {
        offsets_.morning_by_dorm[morning.group_names()[g]] = mres.group_offsets[g];
    }
    CongestionModel postclass = postclass_congestion_model();
    StaggerResult pres = optimize_stagger(postclass, sp.step_s, sp.max_offset_s);
    for (int g = 0; g < postclass.group_count(); ++g) {
        offsets_.postclass_by_group[postclass.group_names()[g]] = pres.group_offsets[g];
    }
    stagger_fully_separated_ = mres.fully_separated && pres.fully_separated;
}

namespace {

// Mutable state of one replication.
class RunState {
public:
    RunState(const Simulation& sim, uint64_t seed)
        : sim_(sim), cfg_(sim.config()), net_(sim.network()), seed_(seed) {}

    RunResult run() {
        setup();
        RunResult result;
        result.seed = seed_;
        result.population = static_cast<int>(agents_.size());
        result.stagger_used = sim_.stagger_offsets();
        result.stagger_fully_separated = sim_.stagger_fully_separated();
        for (int day = 1; day <= cfg_.engine.horizon_days; ++day) {
            run_day(day);
            result.days.push_back(day_stats(day));
        }
        result.heat = std::move(heat_);
        return result;
    }

private:
    struct LocationRuntime {
        std::string name;
        int node = 0;
        bool is_dorm = false;
        bool arrival_mode = false;  // seats taken in arrival order
        VenueSpec spec;
        std::vector<Room> rooms;
    };

    void setup();
    void run_day(int day);
    void process_departures(double now);
    void start_leg(int agent_id, double now);
    void handle_arrival(int agent_id, double now);
    void seat_in_dorm(Agent& a);
    void seat_in_study(Agent& a);
    void seat_by_arrival(Agent& a, int loc);
    void leave_current_place(Agent& a);
    void resolve_and_control(int day);
    DailyStats day_stats(int day) const;
    void push_next_leg_trigger(int agent_id, double now);
    void update_heatmap();

    const Simulation& sim_;
    const ScenarioConfig& cfg_;
    const RoadNetwork& net_;
    uint64_t seed_;

    std::vector<Agent> agents_;
    std::vector<LocationRuntime> locs_;
    std::vector<DaySchedule> schedules_;
    int restaurant_loc_ = -1;
    int cumulative_infected_ = 0;
    int day_ = 0;

    using Event = std::pair<double, int>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::vector<int> movers_;  // sorted agent ids
    std::map<std::pair<int, double>, int> launch_ranks_;  // (origin node, second) -> next rank
    // Latest release point per (first edge, lane), so a later cohort queues
    // behind an undrained earlier one instead of stacking at the door.
    struct QueueTail {
        double progress;
        double time;
    };
    std::map<std::tuple<int, int, int>, QueueTail> queue_tails_;
    std::map<std::pair<int, int>, std::vector<int>> path_cache_;
    ContactLog log_;
    HeatMap heat_;
};

void RunState::setup() {
    const auto& loc_names = sim_.location_names();
    int next_context = kRoadContext + 1;
    locs_.resize(loc_names.size());
    for (size_t i = 0; i < loc_names.size(); ++i) {
        locs_[i].name = loc_names[i];
        locs_[i].node = net_.location(loc_names[i]).node;
        locs_[i].is_dorm = is_dorm_name(loc_names[i], cfg_.population.dormitory_prefix);
        locs_[i].spec = cfg_.venue_for(loc_names[i]);
        locs_[i].arrival_mode = locs_[i].spec.arrival_seating;
    }
    if (cfg_.population.itinerary_mode == "timetabled") {
        restaurant_loc_ = sim_.location_index("restaurant");
    } else {
        // Free-walk venues are come-and-go: seat everyone in arrival order.
        for (const std::string& t : cfg_.population.free_walk_targets) {
            locs_[sim_.location_index(t)].arrival_mode = true;
        }
    }

    // Agents from the deterministic layout; appearance and speed sampled.
    const PopulationLayout& layout = sim_.layout();
    int n = static_cast<int>(layout.members.size());
    agents_.resize(n);
    Substream setup_rng(seed_, StreamId::Setup);
    for (int i = 0; i < n; ++i) {
        Agent& a = agents_[i];
        a.id = i;
        a.dorm_loc = layout.members[i].dorm_loc;
        a.category = layout.members[i].category;
        a.study_loc = layout.members[i].study_loc;
        a.gender = static_cast<int>(setup_rng.uniform_index(2));
        a.age = 17 + static_cast<int>(setup_rng.uniform_index(10));
        a.speed_mps = sample_speed(cfg_.speeds, setup_rng);
    }

    apply_batch(agents_, cfg_.control.batch, seed_);

    // Dormitory rooms: capacity-packed in id order.
    for (size_t li = 0; li < locs_.size(); ++li) {
        LocationRuntime& loc = locs_[li];
        if (!loc.is_dorm) continue;
        std::vector<int> roster;
        for (const Agent& a : agents_) {
            if (a.dorm_loc == static_cast<int>(li)) roster.push_back(a.id);
        }
        int cap = loc.spec.room_capacity;
        int rooms = (static_cast<int>(roster.size()) + cap - 1) / std::max(1, cap);
        loc.rooms.resize(std::max(rooms, 1));
        for (size_t k = 0; k < roster.size(); ++k) {
            Agent& a = agents_[roster[k]];
            a.dorm_room = static_cast<int>(k) / cap;
            a.dorm_seat = static_cast<int>(k) % cap;
        }
        for (int r = 0; r < static_cast<int>(loc.rooms.size()); ++r) {
            int occupants = std::min(cap, std::max(0, static_cast<int>(roster.size()) - r * cap));
            loc.rooms[r].context = next_context++;
            loc.rooms[r].layout = RoomLayout(cap, occupants, loc.spec.room_side_m, true);
        }
    }

    // Study rooms: fixed stock, round-robin per cohort, spread seating.
    if (cfg_.population.itinerary_mode == "timetabled") {
        for (size_t li = 0; li < locs_.size(); ++li) {
            LocationRuntime& loc = locs_[li];
            if (loc.is_dorm || loc.arrival_mode) continue;
            std::vector<int> cohort[2];
            for (const Agent& a : agents_) {
                if (a.study_loc == static_cast<int>(li)) cohort[a.batch].push_back(a.id);
            }
            if (cohort[0].empty() && cohort[1].empty()) continue;
            int peak = static_cast<int>(std::max(cohort[0].size(), cohort[1].size()));
            int rooms = loc.spec.rooms > 0
                            ? loc.spec.rooms
                            : (peak + loc.spec.room_capacity - 1) / loc.spec.room_capacity;
            rooms = std::max(rooms, 1);
            loc.rooms.resize(rooms);
            std::vector<int> occupancy(rooms, 0);
            for (int b = 0; b < 2; ++b) {
                std::vector<int> per_room(rooms, 0);
                for (size_t k = 0; k < cohort[b].size(); ++k) {
                    Agent& a = agents_[cohort[b][k]];
                    a.study_room = static_cast<int>(k) % rooms;
                    a.study_seat = static_cast<int>(k) / rooms;
                    per_room[a.study_room] += 1;
                }
                for (int r = 0; r < rooms; ++r) occupancy[r] = std::max(occupancy[r], per_room[r]);
            }
            for (int r = 0; r < rooms; ++r) {
                loc.rooms[r].context = next_context++;
                loc.rooms[r].layout =
                    RoomLayout(loc.spec.room_capacity, occupancy[r], loc.spec.room_side_m, true);
            }
        }
    }

    // Arrival-seated venues sized for the full population showing up at once.
    for (size_t li = 0; li < locs_.size(); ++li) {
        LocationRuntime& loc = locs_[li];
        if (!loc.arrival_mode) continue;
        int rooms = std::max(1, loc.spec.rooms);
        loc.rooms.resize(rooms);
        int peak_per_room = (n + rooms - 1) / rooms;
        for (int r = 0; r < rooms; ++r) {
            loc.rooms[r].context = next_context++;
            loc.rooms[r].layout = RoomLayout(loc.spec.room_capacity, peak_per_room,
                                             loc.spec.room_side_m, loc.spec.spread_seating);
        }
    }

    // Everyone starts the run resting at the dormitory.
    for (Agent& a : agents_) seat_in_dorm(a);

    // Day schedules; free-walk mode resamples daily instead.
    schedules_.resize(n);
    if (cfg_.population.itinerary_mode == "timetabled") {
        for (Agent& a : agents_) {
            schedules_[a.id] = build_day_schedule(a, cfg_.timetable, cfg_.control.batch.enabled,
                                                  sim_.stagger_offsets(), sim_.location_names(),
                                                  restaurant_loc_,
                                                  cfg_.control.stagger.postclass_separate);
        }
    }

    // Index cases; carriers since before day one.
    Substream placement(seed_, StreamId::Placement);
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < cfg_.engine.initial_infected) {
        chosen.insert(static_cast<int>(placement.uniform_index(n)));
    }
    for (int id : chosen) {
        InfectionStatus& st = agents_[id].infection;
        st.state = HealthState::Latent;
        st.days_carrying = 1;
        st.asymptomatic = placement.uniform() < cfg_.infection.asymptomatic_prob;
        st.infected_on_day = 0;
        cumulative_infected_ += 1;
    }

    // Heat-map frame around the road network.
    double min_x = std::numeric_limits<double>::max();
    double min_y = std::numeric_limits<double>::max();
    double max_x = std::numeric_limits<double>::lowest();
    double max_y = std::numeric_limits<double>::lowest();
    for (const RoadNode& node : net_.nodes()) {
        min_x = std::min(min_x, node.pos.x);
        min_y = std::min(min_y, node.pos.y);
        max_x = std::max(max_x, node.pos.x);
        max_y = std::max(max_y, node.pos.y);
    }
    const double margin = 30.0;
    heat_.cell_m = cfg_.engine.heatmap_cell_m;
    heat_.min_x = min_x - margin;
    heat_.min_y = min_y - margin;
    heat_.nx = static_cast<int>(std::ceil((max_x - min_x + 2 * margin) / heat_.cell_m));
    heat_.ny = static_cast<int>(std::ceil((max_y - min_y + 2 * margin) / heat_.cell_m));
    heat_.visits.assign(static_cast<size_t>(heat_.nx) * heat_.ny, 0.0);
    heat_.peak.assign(static_cast<size_t>(heat_.nx) * heat_.ny, 0);
}

void RunState::seat_in_dorm(Agent& a) {
    const LocationRuntime& loc = locs_[a.dorm_loc];
    const Room& room = loc.rooms[a.dorm_room];
    Vec2 p = room.layout.seat_xy(a.dorm_seat);
    a.pos = {room.context, p.x, p.y};
    a.state = GeneralState::Rest;
    a.current_loc = a.dorm_loc;
}

void RunState::seat_in_study(Agent& a) {
    const LocationRuntime& loc = locs_[a.study_loc];
    const Room& room = loc.rooms[a.study_room];
    Vec2 p = room.layout.seat_xy(a.study_seat);
    a.pos = {room.context, p.x, p.y};
    a.state = GeneralState::Visit;
    a.current_loc = a.study_loc;
}

void RunState::seat_by_arrival(Agent& a, int loc_idx) {
    LocationRuntime& loc = locs_[loc_idx];
    if (loc.rooms.empty()) {
        throw ConfigError("location '" + loc.name + "' has no rooms for arriving visitors");
    }
    int best_room = 0;
    int best_live = std::numeric_limits<int>::max();
    for (int r = 0; r < static_cast<int>(loc.rooms.size()); ++r) {
        int live = 0;
        for (int occ : loc.rooms[r].occupant) {
            if (occ != -1) ++live;
        }
        if (live < best_live) {
            best_live = live;
            best_room = r;
        }
    }
    Room& room = loc.rooms[best_room];
    int seat = room.take_lowest_free_seat(a.id);
    Vec2 p = room.layout.seat_xy(seat);
    a.pos = {room.context, p.x, p.y};
    a.state = GeneralState::Visit;
    a.current_loc = loc_idx;
    a.visit_loc = loc_idx;
    a.visit_room = best_room;
    a.visit_seat = seat;
}

void RunState::leave_current_place(Agent& a) {
    if (a.visit_loc >= 0 && a.visit_room >= 0) {
        locs_[a.visit_loc].rooms[a.visit_room].free_seat(a.visit_seat);
        a.visit_loc = -1;
        a.visit_room = -1;
        a.visit_seat = -1;
    }
}

void RunState::push_next_leg_trigger(int agent_id, double now) {
    Agent& a = agents_[agent_id];
    const DaySchedule& legs = schedules_[agent_id];
    if (a.leg_index >= static_cast<int>(legs.size())) return;
    const Leg& leg = legs[a.leg_index];
    double when;
    if (leg.depart_s >= 0.0) {
        // Per-agent daily jitter; keyed per leg so re-pushing the same leg
        // draws the same value.
        Substream jitter(seed_, StreamId::Jitter, static_cast<uint64_t>(agent_id),
                         static_cast<uint64_t>(day_) * 64 + a.leg_index);
        double delay = std::floor(jitter.uniform(0.0, cfg_.timetable.departure_jitter_s + 1.0));
        when = std::max(leg.depart_s + delay, now + cfg_.locomotion.dt_s);
    } else {
        when = now + leg.dwell_s;
    }
    events_.push({when, agent_id});
}

void RunState::process_departures(double now) {
    while (!events_.empty() && events_.top().first <= now + 1e-9) {
        int agent_id = events_.top().second;
        events_.pop();
        start_leg(agent_id, now);
    }
}

void RunState::start_leg(int agent_id, double now) {
    Agent& a = agents_[agent_id];
    if (a.isolated) return;
    const DaySchedule& legs = schedules_[agent_id];
    if (a.leg_index >= static_cast<int>(legs.size())) return;
    int target = legs[a.leg_index].to_loc;
    a.leg_index += 1;

    leave_current_place(a);
    int from_node = locs_[a.current_loc].node;
    int to_node = locs_[target].node;
    a.current_loc = -1;

    std::pair<int, int> key{from_node, to_node};
    auto it = path_cache_.find(key);
    if (it == path_cache_.end()) {
        it = path_cache_.emplace(key, net_.shortest_path(from_node, to_node)).first;
    }
    int rank = launch_ranks_[{from_node, now}]++;
    a.path = make_active_path(net_, it->second, cfg_.locomotion, cfg_.speeds, rank);
    if (cfg_.locomotion.spacing_enabled && it->second.size() > 1) {
        auto tail_key = std::make_tuple(it->second[0], it->second[1], a.path.lane);
        auto tail = queue_tails_.find(tail_key);
        if (tail != queue_tails_.end()) {
            double drained = tail->second.progress + 1.0 * (now - tail->second.time);
            a.path.progress_m = std::min(a.path.progress_m,
                                         drained - cfg_.speeds.preferred_spacing_m);
        }
        queue_tails_[tail_key] = {a.path.progress_m, now};
    }
    a.state = GeneralState::Move;
    Vec2 world = path_position(a.path, cfg_.locomotion.lane_width_m);
    a.pos = {kRoadContext, world.x, world.y};
    a.leg_ready_s = -1.0;

    // Record the walk target so the arrival handler knows where to seat.
    a.visit_loc = target;
    a.visit_room = -1;
    a.visit_seat = -1;

    if (a.path.finished()) {
        handle_arrival(agent_id, now);
        return;
    }
    movers_.insert(std::lower_bound(movers_.begin(), movers_.end(), agent_id), agent_id);
}

void RunState::handle_arrival(int agent_id, double now) {
    Agent& a = agents_[agent_id];
    int target = a.visit_loc;
    a.visit_loc = -1;
    if (target == a.dorm_loc) {
        seat_in_dorm(a);
    } else if (target == a.study_loc) {
        seat_in_study(a);
    } else {
        seat_by_arrival(a, target);
    }
    a.leg_ready_s = now;
    push_next_leg_trigger(agent_id, now);
}

void RunState::update_heatmap() {
    std::unordered_map<int, int> slice_count;
    for (int id : movers_) {
        const Agent& a = agents_[id];
        if (a.pos.context != kRoadContext) continue;
        int cell = heat_.cell_index(a.pos.x, a.pos.y);
        if (cell < 0) continue;
        heat_.visits[cell] += 1.0;
        slice_count[cell] += 1;
    }
    for (const auto& [cell, count] : slice_count) {
        heat_.peak[cell] = std::max(heat_.peak[cell], count);
    }
}

void RunState::run_day(int day) {
    day_ = day;
    const double day_seconds = 86400.0;
    const double slice = cfg_.infection.slice_seconds;
    const double dt = cfg_.locomotion.dt_s;
    const int slices = static_cast<int>(day_seconds / slice);

    // Free-walk mode redraws every agent's outings each day.
    if (cfg_.population.itinerary_mode == "free_walk") {
        const PopulationSpec& p = cfg_.population;
        std::vector<int> targets;
        for (const std::string& t : p.free_walk_targets) targets.push_back(sim_.location_index(t));
        for (Agent& a : agents_) {
            Substream rng(seed_, StreamId::FreeWalk, static_cast<uint64_t>(a.id),
                          static_cast<uint64_t>(day));
            int span = p.free_walk_max_outings - p.free_walk_min_outings + 1;
            int outings = p.free_walk_min_outings + static_cast<int>(rng.uniform_index(span));
            std::vector<double> starts(outings);
            for (double& s : starts) s = rng.uniform(p.free_walk_start_s, p.free_walk_end_s);
            std::sort(starts.begin(), starts.end());
            DaySchedule legs;
            for (int k = 0; k < outings; ++k) {
                int venue = targets[rng.uniform_index(targets.size())];
                double dwell = rng.uniform(p.free_walk_dwell_min_s, p.free_walk_dwell_max_s);
                legs.push_back({venue, starts[k], -1.0});
                legs.push_back({a.dorm_loc, -1.0, dwell});
            }
            schedules_[a.id] = legs;
        }
    }

    events_ = {};
    launch_ranks_.clear();
    queue_tails_.clear();
    for (Agent& a : agents_) {
        a.leg_index = 0;
        if (!a.isolated && !schedules_[a.id].empty()) push_next_leg_trigger(a.id, 0.0);
    }

    int s = 0;
    while (s < slices) {
        double slice_start = s * slice;
        double slice_end = slice_start + slice;
        double next_event = events_.empty() ? day_seconds : events_.top().first;

        if (movers_.empty() && next_event >= slice_end) {
            // Static stretch: one evaluation stands for every slice in it.
            double until = std::min(next_event, day_seconds);
            int k = std::max(1, static_cast<int>((until - slice_start) / slice));
            evaluate_exposure_slice(agents_, cfg_.infection, cfg_.engine.parallel_agents,
                                    k * slice,
                                    cfg_.control.isolation.enabled ? &log_ : nullptr);
            s += k;
            continue;
        }

        for (double t = slice_start; t < slice_end - 1e-9; t += dt) {
            process_departures(t);
            if (!movers_.empty()) {
                std::vector<int> arrived = step_locomotion(agents_, movers_, cfg_.locomotion,
                                                           cfg_.speeds,
                                                           cfg_.engine.parallel_agents);
                if (!arrived.empty()) {
                    std::vector<int> remaining;
                    remaining.reserve(movers_.size());
                    std::set_difference(movers_.begin(), movers_.end(), arrived.begin(),
                                        arrived.end(), std::back_inserter(remaining));
                    movers_.swap(remaining);
                    for (int id : arrived) handle_arrival(id, t + dt);
                }
            }
        }
        update_heatmap();
        evaluate_exposure_slice(agents_, cfg_.infection, cfg_.engine.parallel_agents, slice,
                                cfg_.control.isolation.enabled ? &log_ : nullptr);
        s += 1;
    }

    // Anyone still on the road at midnight is put at their destination.
    for (int id : std::vector<int>(movers_)) {
        agents_[id].path.progress_m = agents_[id].path.total_length_m();
        handle_arrival(id, day_seconds);
    }
    movers_.clear();

    resolve_and_control(day);
}

void RunState::resolve_and_control(int day) {
    for (Agent& a : agents_) {
        bool was_latent = a.infection.state == HealthState::Latent;
        Substream rng(seed_, StreamId::DayResolve, static_cast<uint64_t>(a.id),
                      static_cast<uint64_t>(day));
        bool newly = resolve_day(a.infection, cfg_.infection, day, rng);
        if (newly) cumulative_infected_ += 1;
        if (was_latent && a.infection.state == HealthState::Infected && a.diagnosis_day < 0) {
            a.diagnosis_day = day;
        }
    }

    const IsolationPolicy& iso = cfg_.control.isolation;
    if (iso.enabled) {
        for (const IsolationAction& act : trace_and_isolate(day, agents_, log_, iso)) {
            Agent& a = agents_[act.agent_id];
            leave_current_place(a);
            a.isolated = true;
            a.isolation_day = day;
            a.state = GeneralState::Rest;
            a.current_loc = -1;
            a.pos = {kHospitalContextBase + a.id, 0.0, 0.0};
        }
        // Suspected cases that never turned out to carry are released.
        for (Agent& a : agents_) {
            if (a.isolated && a.infection.state == HealthState::Susceptible &&
                day - a.isolation_day >= iso.tracing_window_days) {
                a.isolated = false;
                a.isolation_day = -1;
                seat_in_dorm(a);
            }
        }
        log_.roll_day(iso.tracing_window_days);
    }
}

DailyStats RunState::day_stats(int day) const {
    DailyStats stats;
    stats.day = day;
    for (const Agent& a : agents_) {
        switch (a.infection.state) {
            case HealthState::Susceptible: stats.susceptible += 1; break;
            case HealthState::Latent: stats.latent += 1; break;
            case HealthState::Infected: stats.infected += 1; break;
        }
        if (a.isolated) stats.isolated += 1;
        if (!a.isolated && a.infection.carrier()) stats.free_carriers += 1;
    }
    stats.cumulative_infected = cumulative_infected_;
    stats.infection_rate =
        static_cast<double>(cumulative_infected_) / static_cast<double>(agents_.size());
    return stats;
}

}  // namespace

RunResult Simulation::run_once(uint64_t seed) const {
    RunState state(*this, seed);
    return state.run();
}

std::vector<RunResult> Simulation::run_all() const {
    int reps = cfg_.engine.replications;
    std::vector<RunResult> results(reps);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (cfg_.engine.parallel_replications)
#endif
    for (int r = 0; r < reps; ++r) {
        results[r] = run_once(cfg_.engine.seed + static_cast<uint64_t>(r));
    }
    return results;
}

ReplicationSummary Simulation::run_replicated() const { return summarize(run_all()); }

ReplicationSummary summarize(const std::vector<RunResult>& runs) {
    ReplicationSummary sum;
    if (runs.empty()) return sum;
    sum.population = runs[0].population;
    sum.replications = static_cast<int>(runs.size());
    int days = static_cast<int>(runs[0].days.size());

    auto collect = [&](auto field, std::vector<double>& mean, std::vector<double>& stddev) {
        mean.assign(days, 0.0);
        stddev.assign(days, 0.0);
        for (int d = 0; d < days; ++d) {
            double m = 0.0;
            for (const RunResult& r : runs) m += field(r.days[d]);
            m /= runs.size();
            double var = 0.0;
            for (const RunResult& r : runs) {
                double delta = field(r.days[d]) - m;
                var += delta * delta;
            }
            mean[d] = m;
            stddev[d] = std::sqrt(var / runs.size());
        }
    };
    collect([](const DailyStats& d) { return double(d.susceptible); }, sum.mean_susceptible,
            sum.std_susceptible);
    collect([](const DailyStats& d) { return double(d.latent); }, sum.mean_latent, sum.std_latent);
    collect([](const DailyStats& d) { return double(d.infected); }, sum.mean_infected,
            sum.std_infected);
    collect([](const DailyStats& d) { return double(d.isolated); }, sum.mean_isolated,
            sum.std_isolated);
    collect([](const DailyStats& d) { return double(d.cumulative_infected); }, sum.mean_cumulative,
            sum.std_cumulative);
    collect([](const DailyStats& d) { return d.infection_rate; }, sum.mean_rate, sum.std_rate);

    sum.heat = runs[0].heat;
    for (double& v : sum.heat.visits) v = 0.0;
    for (const RunResult& r : runs) {
        for (size_t i = 0; i < r.heat.visits.size() && i < sum.heat.visits.size(); ++i) {
            sum.heat.visits[i] += r.heat.visits[i] / runs.size();
            sum.heat.peak[i] = std::max(sum.heat.peak[i], r.heat.peak[i]);
        }
    }
    return sum;
}

}  // namespace campussim
