#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "campussim/engine.hpp"
#include "campussim/export.hpp"

namespace {

using namespace campussim;

struct CommonOpts {
    std::string scenario_path;
    std::string manifest_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int64_t seed = -1;
    int replications = -1;
};

ScenarioConfig load_config(const CommonOpts& opts) {
    ScenarioConfig cfg = opts.manifest_path.empty() ? ScenarioConfig::from_file(opts.scenario_path)
                                                    : read_manifest(opts.manifest_path);
    for (const std::string& ov : opts.overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + ov + "'");
        }
        cfg.apply_override(ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (opts.seed >= 0) cfg.engine.seed = static_cast<uint64_t>(opts.seed);
    if (opts.replications > 0) cfg.engine.replications = opts.replications;
    return cfg;
}

int cmd_run(const CommonOpts& opts) {
    ScenarioConfig cfg = load_config(opts);
    Simulation sim(cfg);
    ReplicationSummary summary = sim.run_replicated();
    export_run(sim.config(), summary, opts.out_dir);
    int last = summary.days() - 1;
    std::printf("run complete: %d days x %d replications, day-%d infection rate %.4f\n",
                summary.days(), summary.replications, summary.days(),
                last >= 0 ? summary.mean_rate[last] : 0.0);
    std::printf("outputs written to %s\n", opts.out_dir.c_str());
    return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& param,
              const std::vector<std::string>& values) {
    const auto& params = sweepable_parameters();
    auto it = params.find(param);
    if (it == params.end()) {
        std::string known;
        for (const auto& [name, _] : params) known += (known.empty() ? "" : ", ") + name;
        throw ConfigError("sweep parameter '" + param + "' not sweepable (known: " + known + ")");
    }
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream combined(std::filesystem::path(opts.out_dir) / "sweep_summary.csv",
                           std::ios::binary);
    combined << "param,value,day,cumulative,rate,rate_std\n";
    for (const std::string& value : values) {
        ScenarioConfig cfg = load_config(opts);
        cfg.apply_override(it->second, value);
        Simulation sim(cfg);
        ReplicationSummary summary = sim.run_replicated();
        std::string sub = (std::filesystem::path(opts.out_dir) / (param + "=" + value)).string();
        export_run(sim.config(), summary, sub);
        for (int d = 0; d < summary.days(); ++d) {
            char line[256];
            std::snprintf(line, sizeof(line), "%s,%s,%d,%.6f,%.6f,%.6f\n", param.c_str(),
                          value.c_str(), d + 1, summary.mean_cumulative[d], summary.mean_rate[d],
                          summary.std_rate[d]);
            combined << line;
        }
        int last = summary.days() - 1;
        std::printf("%s=%s: day-%d infection rate %.4f\n", param.c_str(), value.c_str(),
                    summary.days(), last >= 0 ? summary.mean_rate[last] : 0.0);
    }
    if (!combined) throw ConfigError("sweep_summary.csv: write failed");
    return 0;
}

int cmd_stagger_opt(const CommonOpts& opts) {
    ScenarioConfig cfg = load_config(opts);
    cfg.control.stagger.enabled = true;
    cfg.control.stagger.morning_by_dorm.clear();
    cfg.control.stagger.postclass_by_group.clear();
    Simulation sim(cfg);

    CongestionModel morning = sim.morning_congestion_model();
    StaggerResult mres = optimize_stagger(morning, cfg.control.stagger.step_s,
                                          cfg.control.stagger.max_offset_s);
    std::printf("travel time for class (congestion %.6g%s)\n", mres.congestion,
                mres.fully_separated ? "" : ", residual overlap");
    std::printf("%-28s %s\n", "building", "start time");
    for (int g = 0; g < morning.group_count(); ++g) {
        std::printf("%-28s %.0fs\n", morning.group_names()[g].c_str(), mres.group_offsets[g]);
    }

    CongestionModel postclass = sim.postclass_congestion_model();
    StaggerResult pres = optimize_stagger(postclass, cfg.control.stagger.step_s,
                                          cfg.control.stagger.max_offset_s);
    std::printf("\ntravel time after class (congestion %.6g%s)\n", pres.congestion,
                pres.fully_separated ? "" : ", residual overlap");
    std::printf("%-28s %s\n", "building", "start time");
    for (int g = 0; g < postclass.group_count(); ++g) {
        std::printf("%-28s %.0fs\n", postclass.group_names()[g].c_str(), pres.group_offsets[g]);
    }
    return 0;
}

int cmd_validate_map(const std::string& map_path) {
    RoadNetwork net = RoadNetwork::load_file(map_path);
    std::printf("map ok: %zu nodes, %zu edges, %zu locations\n", net.nodes().size(),
                net.edges().size(), net.locations().size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"campussim: agent-based epidemic simulator for closed campus environments"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string sweep_param;
    std::vector<std::string> sweep_values;
    std::string map_path;

    auto add_common = [&](CLI::App* cmd, bool manifest_ok) {
        auto* sc = cmd->add_option("--scenario", opts.scenario_path, "Scenario file (JSON)");
        if (manifest_ok) {
            auto* mf = cmd->add_option("--from-manifest", opts.manifest_path,
                                       "Re-run from a run manifest");
            sc->excludes(mf);
            cmd->callback([sc, mf]() {
                if (sc->count() == 0 && mf->count() == 0) {
                    throw CLI::RequiredError("--scenario or --from-manifest");
                }
            });
        } else {
            sc->required();
        }
        cmd->add_option("--out", opts.out_dir, "Output directory");
        cmd->add_option("--seed", opts.seed, "Base seed (overrides scenario)");
        cmd->add_option("--replications", opts.replications, "Replications (overrides scenario)");
        cmd->add_option("--set", opts.overrides, "Override scenario values, key=value");
    };

    CLI::App* run = app.add_subcommand("run", "Run a scenario and export CSV curves");
    add_common(run, true);

    CLI::App* sweep = app.add_subcommand("sweep", "Run one scenario across parameter values");
    add_common(sweep, false);
    sweep->add_option("--param", sweep_param, "Parameter name")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")
        ->required()
        ->delimiter(',');

    CLI::App* stagger = app.add_subcommand("stagger-opt",
                                           "Optimize departure offsets and print the schedule");
    add_common(stagger, false);

    CLI::App* validate = app.add_subcommand("validate-map", "Check a map file");
    validate->add_option("--map", map_path, "Map file (JSON)")->required();

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmd_run(opts);
        if (sweep->parsed()) return cmd_sweep(opts, sweep_param, sweep_values);
        if (stagger->parsed()) return cmd_stagger_opt(opts);
        if (validate->parsed()) return cmd_validate_map(map_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const campussim::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
