#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ovplan/json_io.hpp"
#include "ovplan/verify.hpp"

using namespace ovplan;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;   // usage or I/O failure
constexpr int kExitDomain = 2;  // no route, conflict, infeasible scenario

struct CommonOpts {
    std::string airspace_path;
    std::string out_dir = ".";
    std::string config_path;
    std::uint64_t seed = 0;
};

template <typename T>
void set_if(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

void apply_router(const json& j, RouterConfig& cfg) {
    set_if(j, "arc_radius", cfg.arc_radius);
    set_if(j, "arc_angle", cfg.arc_angle);
    set_if(j, "arc_children", cfg.arc_children);
    set_if(j, "dedup_radius", cfg.dedup_radius);
    set_if(j, "heuristic_weight", cfg.heuristic_weight);
    set_if(j, "conflict_penalty", cfg.conflict_penalty);
    set_if(j, "cruise_speed", cfg.cruise_speed);
    set_if(j, "ov_margin", cfg.ov_margin);
    set_if(j, "nfz_clearance", cfg.nfz_clearance);
    set_if(j, "conflict_samples", cfg.conflict_samples);
}

void apply_sim(const json& j, SimConfig& cfg) {
    set_if(j, "fleet_size", cfg.fleet_size);
    set_if(j, "dt", cfg.dt);
    set_if(j, "segment_duration", cfg.segment_duration);
    set_if(j, "init_radius", cfg.init_radius);
    set_if(j, "speed_low", cfg.speed_low);
    set_if(j, "speed_high", cfg.speed_high);
    set_if(j, "capture_radius", cfg.capture_radius);
    set_if(j, "jitter_sigma", cfg.jitter_sigma);
    set_if(j, "cruise_alt", cfg.cruise_alt);
}

void apply_ovgen(const json& j, OvGenConfig& cfg) {
    set_if(j, "inclusion", cfg.inclusion);
    set_if(j, "bloat_init", cfg.bloat_init);
    set_if(j, "bloat_step", cfg.bloat_step);
    set_if(j, "bloat_max_iters", cfg.bloat_max_iters);
    set_if(j, "region_duration", cfg.region_duration);
    set_if(j, "cov_floor", cfg.cov_floor);
    set_if(j, "min_fit_sample", cfg.min_fit_sample);
    set_if(j, "ensemble_runs", cfg.ensemble_runs);
}

void apply_congested(const json& j, CongestedConfig& cfg) {
    set_if(j, "target_contracts", cfg.target_contracts);
    set_if(j, "window", cfg.window);
    set_if(j, "retry_step", cfg.retry_step);
    set_if(j, "speed_low", cfg.speed_low);
    set_if(j, "speed_high", cfg.speed_high);
    set_if(j, "speed_band", cfg.speed_band);
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(read_text_file(path));
}

void write_artifact(const std::string& out_dir, const std::string& name,
                    const std::string& content, std::vector<std::string>& artifacts) {
    std::filesystem::create_directories(out_dir);
    write_text_file((std::filesystem::path(out_dir) / name).string(), content);
    artifacts.push_back(name);
}

void write_manifest(const CommonOpts& opts, const std::string& command,
                    std::vector<std::string>& artifacts) {
    json manifest{{"command", command}, {"seed", opts.seed}, {"artifacts", artifacts}};
    write_artifact(opts.out_dir, "manifest.json", manifest.dump(2) + "\n", artifacts);
}

int cmd_plan(const CommonOpts& opts, const json& config, const std::string& from,
             const std::string& to, double depart, double speed, double band,
             bool speed_given) {
    const AirspaceModel airspace = load_airspace_file(opts.airspace_path);
    ContractStore store;

    RouterConfig router;
    SimConfig sim;
    OvGenConfig ovgen;
    if (config.contains("router")) apply_router(config.at("router"), router);
    if (config.contains("sim")) apply_sim(config.at("sim"), sim);
    if (config.contains("ovgen")) apply_ovgen(config.at("ovgen"), ovgen);
    if (speed_given) router.cruise_speed = speed;
    router.validate();
    ovgen.validate();

    const auto t0 = std::chrono::steady_clock::now();
    Route route;
    try {
        route = plan(airspace, store, from, to, depart, router);
    } catch (const NoRouteFound& e) {
        std::fprintf(stderr, "no route: %s\n", e.what());
        return kExitDomain;
    }

    sim.speed_low = router.cruise_speed - band;
    sim.speed_high = router.cruise_speed + band;
    sim.seed = mix_seed(opts.seed, 1);
    sim.validate();
    const std::vector<SegmentRecord> records =
        simulate_route_ensemble(route, sim, ovgen.ensemble_runs);
    Contract contract = build_contract(route, records, ovgen, mix_seed(opts.seed, 2),
                                       from + "-" + to);
    contract.speed_low = sim.speed_low;
    contract.speed_high = sim.speed_high;
    const auto t1 = std::chrono::steady_clock::now();

    std::vector<std::string> artifacts;
    write_artifact(opts.out_dir, "route.json",
                   route_to_json(route, airspace.origin).dump(2) + "\n", artifacts);
    write_artifact(opts.out_dir, "contract.json",
                   contract_to_json(contract, airspace.origin).dump(2) + "\n", artifacts);
    write_artifact(opts.out_dir, "plan.geojson",
                   contract_to_geojson(contract, airspace.origin).dump(2) + "\n", artifacts);
    write_manifest(opts, "plan", artifacts);

    std::printf("route %s -> %s: length %.1f m, %zu waypoints, %zu ovs, %.3f s\n",
                from.c_str(), to.c_str(), route.total_length, route.waypoints.size(),
                contract.ovs.size(),
                std::chrono::duration<double>(t1 - t0).count());
    return kExitOk;
}

int cmd_congested(const CommonOpts& opts, const json& config) {
    const AirspaceModel airspace = load_airspace_file(opts.airspace_path);

    CongestedConfig cfg;
    cfg.seed = opts.seed;
    if (config.contains("router")) apply_router(config.at("router"), cfg.router);
    if (config.contains("sim")) apply_sim(config.at("sim"), cfg.sim);
    if (config.contains("ovgen")) apply_ovgen(config.at("ovgen"), cfg.ovgen);
    if (config.contains("congested")) apply_congested(config.at("congested"), cfg);

    ContractStore store;
    CongestedResult result;
    try {
        result = run_congested(airspace, store, cfg);
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "congested scenario failed: %s\n", e.what());
        return kExitDomain;
    }

    std::vector<std::string> artifacts;
    json contracts = json::array();
    for (const ScheduleEntry& entry : result.schedule) {
        const Contract c = store.get(entry.contract_id);
        contracts.push_back(contract_to_json(c, airspace.origin));
        write_artifact(opts.out_dir, entry.contract_id + ".geojson",
                       contract_to_geojson(c, airspace.origin).dump(2) + "\n", artifacts);
    }
    write_artifact(opts.out_dir, "contracts.json", contracts.dump(2) + "\n", artifacts);
    write_artifact(opts.out_dir, "conflict_report.json",
                   conflict_report_to_json(result.report).dump(2) + "\n", artifacts);
    write_artifact(opts.out_dir, "schedule.csv", schedule_to_csv(result.schedule),
                   artifacts);
    write_manifest(opts, "congested", artifacts);

    std::printf("congested: %zu contracts, report %s\n", result.schedule.size(),
                result.report.clear() ? "clear" : "CONFLICTS");
    return result.report.clear() ? kExitOk : kExitDomain;
}

int cmd_verify(const CommonOpts& opts, const std::vector<std::string>& contract_paths,
               int trials) {
    const AirspaceModel airspace = load_airspace_file(opts.airspace_path);
    ContractStore store;
    std::vector<std::string> ids;
    for (const std::string& path : contract_paths) {
        const Contract c =
            contract_from_json(json::parse(read_text_file(path)), airspace.origin);
        ids.push_back(store.register_contract(c));
    }

    const ConflictReport report = check_contracts(store);
    std::vector<std::string> artifacts;
    write_artifact(opts.out_dir, "conflict_report.json",
                   conflict_report_to_json(report).dump(2) + "\n", artifacts);

    for (std::size_t i = 0; i < ids.size(); ++i) {
        const Contract c = store.get(ids[i]);
        SimConfig sim;
        sim.seed = mix_seed(opts.seed, i, 3);
        const AccuracyReport acc = check_accuracy(c, sim, trials);
        write_artifact(opts.out_dir, "accuracy-" + ids[i] + ".json",
                       accuracy_report_to_json(acc).dump(2) + "\n", artifacts);
        std::printf("%s: accuracy %.4f (%zu/%zu records)\n", ids[i].c_str(), acc.accuracy,
                    acc.included_records, acc.total_records);
    }
    write_manifest(opts, "verify", artifacts);

    std::printf("conflict report: %s (%zu contracts)\n",
                report.clear() ? "clear" : "CONFLICTS", ids.size());
    return report.clear() ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strategic pre-flight route planning and operational-volume contracts"};
    app.require_subcommand(1);

    CommonOpts opts;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--airspace", opts.airspace_path, "airspace JSON file")
            ->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "RNG seed");
        sub->add_option("--config", opts.config_path,
                        "JSON config file (flags override it)");
    };

    std::string from;
    std::string to;
    double depart = 0.0;
    double speed = 15.0;
    double band = 2.0;
    CLI::App* plan_cmd = app.add_subcommand("plan", "plan one route and its contract");
    add_common(plan_cmd);
    plan_cmd->add_option("--from", from, "origin vertiport id")->required();
    plan_cmd->add_option("--to", to, "destination vertiport id")->required();
    plan_cmd->add_option("--depart", depart, "departure time, seconds");
    CLI::Option* speed_opt =
        plan_cmd->add_option("--speed", speed, "cruise speed, m/s");
    plan_cmd->add_option("--band", band, "half-width of the speed uncertainty band, m/s");

    CLI::App* congested_cmd =
        app.add_subcommand("congested", "run the congested-environment scenario");
    add_common(congested_cmd);

    std::vector<std::string> contract_paths;
    int trials = 100;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "check contracts for conflicts and accuracy");
    add_common(verify_cmd);
    verify_cmd->add_option("contracts", contract_paths, "contract JSON files")
        ->required();
    verify_cmd->add_option("--trials", trials, "aircraft per accuracy re-simulation");

    CLI11_PARSE(app, argc, argv);

    try {
        const json config = load_config(opts.config_path);
        if (plan_cmd->parsed())
            return cmd_plan(opts, config, from, to, depart, speed, band,
                            speed_opt->count() > 0);
        if (congested_cmd->parsed()) return cmd_congested(opts, config);
        return cmd_verify(opts, contract_paths, trials);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
