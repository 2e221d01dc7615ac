#include "campussim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace campussim {

namespace {

using nlohmann::json;

// Wraps a json object and rejects keys outside the declared schema.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": must be an object");
    }

    void allow(std::initializer_list<const char*> keys) {
        for (const auto& [key, _] : j_.items()) {
            if (std::find_if(keys.begin(), keys.end(),
                             [&](const char* k) { return key == k; }) == keys.end()) {
                throw ConfigError(path_ + ": unknown key '" + key + "'");
            }
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const { return j_.at(key); }
    const json& self() const { return j_; }

    template <typename T>
    T get(const char* key, T fallback) const {
        if (!j_.contains(key)) return fallback;
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(path_ + "." + key + ": wrong type");
        }
    }

    std::string path(const char* key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
};

int line_of_offset(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

json parse_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " +
                          e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

}  // namespace

void PopulationSpec::validate() const {
    if (groups.empty()) {
        if (total <= 0) throw ConfigError("population.total: must be > 0");
        if (category_mix.size() != 4) {
            throw ConfigError("population.category_mix: needs exactly 4 fractions");
        }
        double sum = 0.0;
        for (double f : category_mix) {
            if (f < 0.0) throw ConfigError("population.category_mix: fractions must be >= 0");
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw ConfigError("population.category_mix: fractions must sum to 1");
        }
    } else {
        for (size_t i = 0; i < groups.size(); ++i) {
            const PopulationGroup& g = groups[i];
            std::string at = "population.groups[" + std::to_string(i) + "]";
            if (g.count <= 0) throw ConfigError(at + ".count: must be > 0");
            if (g.category < 1 || g.category > 4) {
                throw ConfigError(at + ".category: must be 1..4");
            }
        }
    }
    if (itinerary_mode != "timetabled" && itinerary_mode != "free_walk") {
        throw ConfigError("population.itinerary_mode: must be 'timetabled' or 'free_walk'");
    }
    if (itinerary_mode == "free_walk") {
        if (free_walk_min_outings < 1 || free_walk_max_outings < free_walk_min_outings) {
            throw ConfigError("population.free_walk outings: need 1 <= min <= max");
        }
        if (!(free_walk_end_s > free_walk_start_s)) {
            throw ConfigError("population.free_walk window: end must come after start");
        }
        if (!(free_walk_dwell_min_s > 0.0) || free_walk_dwell_max_s < free_walk_dwell_min_s) {
            throw ConfigError("population.free_walk dwell: need 0 < min <= max");
        }
        if (free_walk_targets.empty()) {
            throw ConfigError("population.free_walk_targets: required in free_walk mode");
        }
    }
}

void EngineSpec::validate() const {
    if (horizon_days < 1) throw ConfigError("engine.horizon_days: must be >= 1");
    if (initial_infected < 0) throw ConfigError("engine.initial_infected: must be >= 0");
    if (replications < 1) throw ConfigError("engine.replications: must be >= 1");
    if (!(heatmap_cell_m > 0.0)) throw ConfigError("engine.heatmap_cell_m: must be > 0");
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    json j = read_json_file(path);
    std::string dir = std::filesystem::path(path).parent_path().string();
    return from_json(j, dir, path);
}

ScenarioConfig ScenarioConfig::from_json(const json& j, const std::string& base_dir,
                                         const std::string& origin_name) {
    ScenarioConfig cfg;
    Block top(j, origin_name);
    top.allow({"map", "population", "infection", "control", "timetable", "speed", "locomotion",
               "venues", "engine"});

    if (!top.has("map")) throw ConfigError(origin_name + ".map: required");
    if (top.raw("map").is_string()) {
        std::filesystem::path p(top.raw("map").get<std::string>());
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        cfg.map_json = read_json_file(p.string());
    } else if (top.raw("map").is_object()) {
        cfg.map_json = top.raw("map");
    } else {
        throw ConfigError(origin_name + ".map: must be a file path or an inline map object");
    }

    if (top.has("population")) {
        Block b(top.raw("population"), "population");
        b.allow({"total", "category_mix", "dormitory_prefix", "groups", "itinerary_mode",
                 "free_walk_min_outings", "free_walk_max_outings", "free_walk_start_s",
                 "free_walk_end_s", "free_walk_dwell_min_s", "free_walk_dwell_max_s",
                 "free_walk_targets"});
        PopulationSpec& p = cfg.population;
        p.total = b.get("total", p.total);
        p.category_mix = b.get("category_mix", p.category_mix);
        p.dormitory_prefix = b.get("dormitory_prefix", p.dormitory_prefix);
        p.itinerary_mode = b.get("itinerary_mode", p.itinerary_mode);
        p.free_walk_min_outings = b.get("free_walk_min_outings", p.free_walk_min_outings);
        p.free_walk_max_outings = b.get("free_walk_max_outings", p.free_walk_max_outings);
        p.free_walk_start_s = b.get("free_walk_start_s", p.free_walk_start_s);
        p.free_walk_end_s = b.get("free_walk_end_s", p.free_walk_end_s);
        p.free_walk_dwell_min_s = b.get("free_walk_dwell_min_s", p.free_walk_dwell_min_s);
        p.free_walk_dwell_max_s = b.get("free_walk_dwell_max_s", p.free_walk_dwell_max_s);
        p.free_walk_targets = b.get("free_walk_targets", p.free_walk_targets);
        if (b.has("groups")) {
            for (size_t i = 0; i < b.raw("groups").size(); ++i) {
                Block g(b.raw("groups")[i], "population.groups[" + std::to_string(i) + "]");
                g.allow({"dormitory", "category", "count"});
                PopulationGroup pg;
                pg.dormitory = g.get<std::string>("dormitory", "");
                pg.category = g.get("category", 1);
                pg.count = g.get("count", 0);
                p.groups.push_back(pg);
            }
        }
    }

    if (top.has("infection")) {
        Block b(top.raw("infection"), "infection");
        b.allow({"radius_m", "incubation_days", "threshold", "beta", "asymptomatic_prob",
                 "slice_seconds"});
        InfectionParams& ip = cfg.infection;
        ip.radius_m = b.get("radius_m", ip.radius_m);
        ip.incubation_days = b.get("incubation_days", ip.incubation_days);
        ip.threshold = b.get("threshold", ip.threshold);
        ip.beta = b.get("beta", ip.beta);
        ip.asymptomatic_prob = b.get("asymptomatic_prob", ip.asymptomatic_prob);
        ip.slice_seconds = b.get("slice_seconds", ip.slice_seconds);
    }

    if (top.has("control")) {
        Block b(top.raw("control"), "control");
        b.allow({"batch", "stagger", "isolation"});
        if (b.has("batch")) {
            Block bb(b.raw("batch"), "control.batch");
            bb.allow({"enabled", "split"});
            cfg.control.batch.enabled = bb.get("enabled", false);
            cfg.control.batch.split = bb.get("split", 0.5);
        }
        if (b.has("stagger")) {
            Block sb(b.raw("stagger"), "control.stagger");
            sb.allow({"enabled", "max_offset_s", "step_s", "morning_by_dorm",
                      "postclass_by_group", "postclass_separate"});
            StaggerPolicy& sp = cfg.control.stagger;
            sp.enabled = sb.get("enabled", false);
            sp.max_offset_s = sb.get("max_offset_s", sp.max_offset_s);
            sp.step_s = sb.get("step_s", sp.step_s);
            sp.morning_by_dorm =
                sb.get("morning_by_dorm", std::map<std::string, double>{});
            sp.postclass_by_group =
                sb.get("postclass_by_group", std::map<std::string, double>{});
            sp.postclass_separate = sb.get("postclass_separate", sp.postclass_separate);
        }
        if (b.has("isolation")) {
            Block ib(b.raw("isolation"), "control.isolation");
            ib.allow({"enabled", "detection_delay_days", "tracing_window_days",
                      "close_contact_seconds"});
            IsolationPolicy& ip = cfg.control.isolation;
            ip.enabled = ib.get("enabled", false);
            ip.detection_delay_days = ib.get("detection_delay_days", ip.detection_delay_days);
            ip.tracing_window_days = ib.get("tracing_window_days", ip.tracing_window_days);
            ip.close_contact_seconds = ib.get("close_contact_seconds", ip.close_contact_seconds);
        }
    }

    if (top.has("timetable")) {
        Block b(top.raw("timetable"), "timetable");
        b.allow({"morning_departure_s", "lunch_departure_s", "lunch_dwell_s",
                 "afternoon_return_s", "batch2_lunch_departure_s", "batch2_return_s",
                 "departure_jitter_s"});
        Timetable& tt = cfg.timetable;
        tt.morning_departure_s = b.get("morning_departure_s", tt.morning_departure_s);
        tt.lunch_departure_s = b.get("lunch_departure_s", tt.lunch_departure_s);
        tt.lunch_dwell_s = b.get("lunch_dwell_s", tt.lunch_dwell_s);
        tt.afternoon_return_s = b.get("afternoon_return_s", tt.afternoon_return_s);
        tt.batch2_lunch_departure_s = b.get("batch2_lunch_departure_s", tt.batch2_lunch_departure_s);
        tt.batch2_return_s = b.get("batch2_return_s", tt.batch2_return_s);
        tt.departure_jitter_s = b.get("departure_jitter_s", tt.departure_jitter_s);
    }

    if (top.has("speed")) {
        Block b(top.raw("speed"), "speed");
        b.allow({"v_min", "v_max", "mean", "stddev", "preferred_spacing_m", "hard_stop_m"});
        SpeedModel& sm = cfg.speeds;
        sm.v_min = b.get("v_min", sm.v_min);
        sm.v_max = b.get("v_max", sm.v_max);
        sm.mean = b.get("mean", sm.mean);
        sm.stddev = b.get("stddev", sm.stddev);
        sm.preferred_spacing_m = b.get("preferred_spacing_m", sm.preferred_spacing_m);
        sm.hard_stop_m = b.get("hard_stop_m", sm.hard_stop_m);
    }

    if (top.has("locomotion")) {
        Block b(top.raw("locomotion"), "locomotion");
        b.allow({"dt_s", "lane_width_m", "spacing_enabled"});
        cfg.locomotion.dt_s = b.get("dt_s", cfg.locomotion.dt_s);
        cfg.locomotion.lane_width_m = b.get("lane_width_m", cfg.locomotion.lane_width_m);
        cfg.locomotion.spacing_enabled = b.get("spacing_enabled", cfg.locomotion.spacing_enabled);
    }

    if (top.has("venues")) {
        if (!top.raw("venues").is_object()) throw ConfigError("venues: must be an object");
        for (const auto& [pattern, spec] : top.raw("venues").items()) {
            Block b(spec, "venues." + pattern);
            b.allow({"rooms", "room_capacity", "room_side_m", "arrival_seating",
                     "spread_seating"});
            VenueSpec v;
            v.pattern = pattern;
            v.rooms = b.get("rooms", v.rooms);
            v.room_capacity = b.get("room_capacity", v.room_capacity);
            v.room_side_m = b.get("room_side_m", v.room_side_m);
            v.arrival_seating = b.get("arrival_seating", v.arrival_seating);
            v.spread_seating = b.get("spread_seating", v.spread_seating);
            cfg.venues.push_back(v);
        }
    }

    if (cfg.venues.empty()) {
        VenueSpec fallback;
        fallback.pattern = "*";
        cfg.venues.push_back(fallback);
    }

    if (top.has("engine")) {
        Block b(top.raw("engine"), "engine");
        b.allow({"horizon_days", "initial_infected", "replications", "seed",
                 "parallel_replications", "parallel_agents", "heatmap_cell_m"});
        EngineSpec& e = cfg.engine;
        e.horizon_days = b.get("horizon_days", e.horizon_days);
        e.initial_infected = b.get("initial_infected", e.initial_infected);
        e.replications = b.get("replications", e.replications);
        e.seed = b.get("seed", e.seed);
        e.parallel_replications = b.get("parallel_replications", e.parallel_replications);
        e.parallel_agents = b.get("parallel_agents", e.parallel_agents);
        e.heatmap_cell_m = b.get("heatmap_cell_m", e.heatmap_cell_m);
    }

    return cfg;
}

nlohmann::json ScenarioConfig::to_json() const {
    json j;
    j["map"] = map_json;

    json p;
    p["total"] = population.total;
    p["category_mix"] = population.category_mix;
    p["dormitory_prefix"] = population.dormitory_prefix;
    p["itinerary_mode"] = population.itinerary_mode;
    p["free_walk_min_outings"] = population.free_walk_min_outings;
    p["free_walk_max_outings"] = population.free_walk_max_outings;
    p["free_walk_start_s"] = population.free_walk_start_s;
    p["free_walk_end_s"] = population.free_walk_end_s;
    p["free_walk_dwell_min_s"] = population.free_walk_dwell_min_s;
    p["free_walk_dwell_max_s"] = population.free_walk_dwell_max_s;
    p["free_walk_targets"] = population.free_walk_targets;
    if (!population.groups.empty()) {
        json groups = json::array();
        for (const PopulationGroup& g : population.groups) {
            groups.push_back({{"dormitory", g.dormitory}, {"category", g.category},
                              {"count", g.count}});
        }
        p["groups"] = groups;
    }
    j["population"] = p;

    j["infection"] = {{"radius_m", infection.radius_m},
                      {"incubation_days", infection.incubation_days},
                      {"threshold", infection.threshold},
                      {"beta", infection.beta},
                      {"asymptomatic_prob", infection.asymptomatic_prob},
                      {"slice_seconds", infection.slice_seconds}};

    j["control"] = {
        {"batch", {{"enabled", control.batch.enabled}, {"split", control.batch.split}}},
        {"stagger",
         {{"enabled", control.stagger.enabled},
          {"max_offset_s", control.stagger.max_offset_s},
          {"step_s", control.stagger.step_s},
          {"morning_by_dorm", control.stagger.morning_by_dorm},
          {"postclass_by_group", control.stagger.postclass_by_group},
          {"postclass_separate", control.stagger.postclass_separate}}},
        {"isolation",
         {{"enabled", control.isolation.enabled},
          {"detection_delay_days", control.isolation.detection_delay_days},
          {"tracing_window_days", control.isolation.tracing_window_days},
          {"close_contact_seconds", control.isolation.close_contact_seconds}}}};

    j["timetable"] = {{"morning_departure_s", timetable.morning_departure_s},
                      {"lunch_departure_s", timetable.lunch_departure_s},
                      {"lunch_dwell_s", timetable.lunch_dwell_s},
                      {"afternoon_return_s", timetable.afternoon_return_s},
                      {"batch2_lunch_departure_s", timetable.batch2_lunch_departure_s},
                      {"batch2_return_s", timetable.batch2_return_s},
                      {"departure_jitter_s", timetable.departure_jitter_s}};

    j["speed"] = {{"v_min", speeds.v_min},
                  {"v_max", speeds.v_max},
                  {"mean", speeds.mean},
                  {"stddev", speeds.stddev},
                  {"preferred_spacing_m", speeds.preferred_spacing_m},
                  {"hard_stop_m", speeds.hard_stop_m}};

    j["locomotion"] = {{"dt_s", locomotion.dt_s},
                       {"lane_width_m", locomotion.lane_width_m},
                       {"spacing_enabled", locomotion.spacing_enabled}};

    json venues = json::object();
    for (const VenueSpec& v : this->venues) {
        venues[v.pattern] = {{"rooms", v.rooms},
                             {"room_capacity", v.room_capacity},
                             {"room_side_m", v.room_side_m},
                             {"arrival_seating", v.arrival_seating},
                             {"spread_seating", v.spread_seating}};
    }
    j["venues"] = venues;

    j["engine"] = {{"horizon_days", engine.horizon_days},
                   {"initial_infected", engine.initial_infected},
                   {"replications", engine.replications},
                   {"seed", engine.seed},
                   {"parallel_replications", engine.parallel_replications},
                   {"parallel_agents", engine.parallel_agents},
                   {"heatmap_cell_m", engine.heatmap_cell_m}};
    return j;
}

void ScenarioConfig::apply_override(const std::string& dotted_key, const std::string& value) {
    json resolved = to_json();
    json* node = &resolved;
    std::string path;
    std::stringstream keys(dotted_key);
    std::string part;
    while (std::getline(keys, part, '.')) {
        path += (path.empty() ? "" : ".") + part;
        if (!node->is_object() || !node->contains(part)) {
            throw ConfigError("override '" + dotted_key + "': unknown key at '" + path + "'");
        }
        node = &(*node)[part];
    }
    json parsed;
    if (node->is_string()) {
        parsed = value;
    } else {
        parsed = parse_text(value, "override '" + dotted_key + "'");
        if (node->is_number_integer() && !parsed.is_number_integer()) {
            throw ConfigError("override '" + dotted_key + "': expected integer, got '" + value + "'");
        }
        if (node->is_number_float() && !parsed.is_number()) {
            throw ConfigError("override '" + dotted_key + "': expected number, got '" + value + "'");
        }
        if (node->is_boolean() && !parsed.is_boolean()) {
            throw ConfigError("override '" + dotted_key + "': expected boolean, got '" + value + "'");
        }
        if ((node->is_array() || node->is_object()) &&
            parsed.type() != node->type()) {
            throw ConfigError("override '" + dotted_key + "': expected " +
                              std::string(node->type_name()));
        }
    }
    *node = parsed;
    *this = from_json(resolved, "", "override");
}

RoadNetwork ScenarioConfig::load_network() const {
    return RoadNetwork::from_json_text(map_json.dump(), "map");
}

const VenueSpec& ScenarioConfig::venue_for(const std::string& location_name) const {
    const VenueSpec* best = nullptr;
    size_t best_len = 0;
    for (const VenueSpec& v : venues) {
        if (v.pattern == location_name) return v;
        if (!v.pattern.empty() && v.pattern.back() == '*') {
            std::string prefix = v.pattern.substr(0, v.pattern.size() - 1);
            if (location_name.rfind(prefix, 0) == 0 &&
                (best == nullptr || prefix.size() >= best_len)) {
                best = &v;
                best_len = prefix.size();
            }
        }
    }
    if (best == nullptr) {
        throw ConfigError("venues: no entry matches location '" + location_name + "'");
    }
    return *best;
}

void ScenarioConfig::validate(const RoadNetwork& net) const {
    population.validate();
    infection.validate();
    control.validate();
    timetable.validate();
    speeds.validate();
    locomotion.validate();
    engine.validate();
    for (const VenueSpec& v : venues) v.validate();

    // Required named locations for the active mode.
    if (population.itinerary_mode == "timetabled") {
        for (const char* name : {"teaching_building", "library", "laboratory",
                                 "administration_building", "restaurant"}) {
            if (!net.has_location(name)) {
                throw ConfigError(std::string("map.locations: timetabled mode requires '") +
                                  name + "'");
            }
        }
    } else {
        for (const std::string& t : population.free_walk_targets) {
            if (!net.has_location(t)) {
                throw ConfigError("population.free_walk_targets: unknown location '" + t + "'");
            }
        }
    }
    if (control.isolation.enabled && !net.has_location("school_hospital")) {
        throw ConfigError("map.locations: isolation control requires 'school_hospital'");
    }

    int dorm_count = 0;
    for (const auto& [name, _] : net.locations()) {
        if (name.rfind(population.dormitory_prefix, 0) == 0) ++dorm_count;
    }
    if (dorm_count == 0) {
        throw ConfigError("map.locations: no location starts with dormitory prefix '" +
                          population.dormitory_prefix + "'");
    }
    for (const PopulationGroup& g : population.groups) {
        if (!net.has_location(g.dormitory)) {
            throw ConfigError("population.groups: unknown dormitory '" + g.dormitory + "'");
        }
    }

    int total = population.total;
    if (!population.groups.empty()) {
        total = 0;
        for (const PopulationGroup& g : population.groups) total += g.count;
    }
    if (engine.initial_infected > total) {
        throw ConfigError("engine.initial_infected: exceeds the population size");
    }

    // Every location must resolve to a venue layout.
    for (const auto& [name, _] : net.locations()) {
        venue_for(name);
    }
}

const std::map<std::string, std::string>& sweepable_parameters() {
    static const std::map<std::string, std::string> params = {
        {"population", "population.total"},
        {"beta", "infection.beta"},
        {"asymptomatic_prob", "infection.asymptomatic_prob"},
        {"initial_infected", "engine.initial_infected"},
    };
    return params;
}

}  // namespace campussim
