#include "ovplan/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ovplan {

namespace {

void collect_region_conflicts(const std::string& id_a, const Contract& a,
                              const std::string& id_b, const Contract& b,
                              std::vector<ConflictPair>& out) {
    for (std::size_t i = 0; i < a.ovs.size(); ++i) {
        const OperationalVolume& ov_a = a.ovs[i];
        for (std::size_t j = 0; j < b.ovs.size(); ++j) {
            const OperationalVolume& ov_b = b.ovs[j];
            if (ov_a.start > ov_b.end || ov_a.end < ov_b.start) continue;
            for (std::size_t ra = 0; ra < ov_a.regions.size(); ++ra) {
                const EllipseRegion& reg_a = ov_a.regions[ra];
                for (std::size_t rb = 0; rb < ov_b.regions.size(); ++rb) {
                    const EllipseRegion& reg_b = ov_b.regions[rb];
                    if (reg_a.t_start > reg_b.t_end || reg_a.t_end < reg_b.t_start)
                        continue;
                    if (ellipses_overlap(reg_a.derived_ellipse(), reg_b.derived_ellipse())) {
                        out.push_back({id_a, id_b, i, j, ra, rb,
                                       std::max(reg_a.t_start, reg_b.t_start),
                                       std::min(reg_a.t_end, reg_b.t_end)});
                    }
                }
            }
        }
    }
}

bool conflicts_with_store(const ContractStore& store, const Contract& candidate) {
    for (const OperationalVolume& ov : candidate.ovs) {
        for (const auto& [other_id, other_ov] : store.query_interval(ov.start, ov.end)) {
            for (const EllipseRegion& reg : ov.regions) {
                for (const EllipseRegion& other : other_ov.regions) {
                    if (reg.t_start > other.t_end || reg.t_end < other.t_start) continue;
                    if (ellipses_overlap(reg.derived_ellipse(), other.derived_ellipse()))
                        return true;
                }
            }
        }
    }
    return false;
}

}  // namespace

ConflictReport check_contracts(const ContractStore& store) {
    ConflictReport report;
    const std::vector<std::string> ids = store.contract_ids();
    for (const std::string& id_a : ids) {
        const Contract a = store.get(id_a);
        // The time-bin index narrows each OV of `a` to temporally nearby OVs.
        std::vector<std::string> partners;
        for (const OperationalVolume& ov : a.ovs) {
            for (const auto& [id_b, other_ov] : store.query_interval(ov.start, ov.end)) {
                if (id_b <= id_a) continue;  // each unordered pair once
                (void)other_ov;
                if (std::find(partners.begin(), partners.end(), id_b) == partners.end())
                    partners.push_back(id_b);
            }
        }
        std::sort(partners.begin(), partners.end());
        for (const std::string& id_b : partners)
            collect_region_conflicts(id_a, a, id_b, store.get(id_b), report.pairs);
    }
    return report;
}

AccuracyReport check_accuracy(const Contract& contract, const SimConfig& cfg, int trials) {
    contract.validate();
    SimConfig sim = cfg;
    sim.fleet_size = trials;
    sim.speed_low = contract.speed_low;
    sim.speed_high = contract.speed_high;
    sim.validate();

    // Fresh run of the same uncertainty model, new seed; only records inside
    // the contract's coverage window can be attributed to an OV.
    const std::vector<SegmentRecord> records = simulate_route(contract.route, sim);

    AccuracyReport report;
    report.per_ov.resize(contract.ovs.size());
    for (std::size_t i = 0; i < contract.ovs.size(); ++i) report.per_ov[i].ov_index = i;

    for (const SegmentRecord& rec : records) {
        for (std::size_t si = 0; si < rec.slices.size(); ++si) {
            const double t = rec.time_at(si);
            if (t < contract.start_time() - 1e-9 || t > contract.end_time() + 1e-9) continue;
            for (const AircraftState& s : rec.slices[si]) {
                ++report.total_records;
                bool included = false;
                for (const OperationalVolume& ov : contract.ovs) {
                    if (ov.start > t || ov.end < t) continue;
                    for (const EllipseRegion& region : ov.regions) {
                        if (region.t_start > t || region.t_end < t) continue;
                        if (point_in_ellipse(s.position, region.derived_ellipse())) {
                            included = true;
                            break;
                        }
                    }
                    if (included) break;
                }
                if (included) ++report.included_records;
                // Attribute the record to the first OV whose span contains t.
                for (std::size_t i = 0; i < contract.ovs.size(); ++i) {
                    if (contract.ovs[i].start <= t && t <= contract.ovs[i].end) {
                        ++report.per_ov[i].total;
                        if (included) ++report.per_ov[i].included;
                        break;
                    }
                }
            }
        }
    }
    report.accuracy = report.total_records == 0
                          ? 1.0
                          : static_cast<double>(report.included_records) /
                                static_cast<double>(report.total_records);
    return report;
}

CongestedResult run_congested(const AirspaceModel& airspace, ContractStore& store,
                              const CongestedConfig& cfg) {
    if (cfg.target_contracts < 1)
        throw std::invalid_argument("run_congested: target_contracts must be >= 1");
    airspace.validate();

    Rng rng(cfg.seed);
    const double rate = cfg.target_contracts / cfg.window;
    double clock = 0.0;

    CongestedResult result;
    int created = 0;
    int attempts = 0;
    const int max_attempts = 10 * cfg.target_contracts;

    while (created < cfg.target_contracts) {
        if (attempts++ >= max_attempts)
            throw std::runtime_error("run_congested: scenario infeasible after " +
                                     std::to_string(max_attempts) + " attempts");

        // Poisson-process departure sequence, wrapped into the window.
        clock = std::fmod(clock + rng.exponential(rate), cfg.window);
        const double requested = clock;

        // Uniform distinct vertiport pair.
        const std::size_t nv = airspace.vertiports.size();
        const std::size_t oi = rng.index(nv);
        std::size_t di = rng.index(nv - 1);
        if (di >= oi) ++di;
        const std::string& origin = airspace.vertiports[oi].id;
        const std::string& destination = airspace.vertiports[di].id;

        RouterConfig rcfg = cfg.router;
        rcfg.cruise_speed = rng.uniform(cfg.speed_low, cfg.speed_high);

        for (double depart = requested; depart <= cfg.window + 1e-9;
             depart += cfg.retry_step) {
            Route route;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                route = plan(airspace, store, origin, destination, depart, rcfg);
            } catch (const NoRouteFound&) {
                continue;  // closest later departure in retry_step intervals
            }

            SimConfig sim = cfg.sim;
            sim.speed_low = rcfg.cruise_speed - cfg.speed_band;
            sim.speed_high = rcfg.cruise_speed + cfg.speed_band;
            sim.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(created), 1);
            const std::vector<SegmentRecord> records =
                simulate_route_ensemble(route, sim, cfg.ovgen.ensemble_runs);

            Contract contract =
                build_contract(route, records, cfg.ovgen,
                               mix_seed(cfg.seed, static_cast<std::uint64_t>(created), 2),
                               "contract-" + std::to_string(created));
            contract.speed_low = sim.speed_low;
            contract.speed_high = sim.speed_high;

            // The route was deconflicted with margin; the built volumes must
            // still prove it. A residual overlap is treated like no-route.
            if (conflicts_with_store(store, contract)) continue;

            const auto t1 = std::chrono::steady_clock::now();
            store.register_contract(contract);
            result.schedule.push_back(
                {contract.id, origin, destination, requested, depart,
                 std::chrono::duration<double>(t1 - t0).count(), route.total_length,
                 contract.ovs.size()});
            ++created;
            break;
        }
    }

    result.report = check_contracts(store);
    return result;
}

std::size_t cross_check_foreign_inclusions(const ContractStore& store, const SimConfig& cfg,
                                           int trials_per_contract, std::uint64_t seed) {
    const std::vector<std::string> ids = store.contract_ids();
    std::vector<Contract> contracts;
    contracts.reserve(ids.size());
    for (const std::string& id : ids) contracts.push_back(store.get(id));

    std::size_t inclusions = 0;
    for (std::size_t ci = 0; ci < contracts.size(); ++ci) {
        const Contract& own = contracts[ci];
        SimConfig sim = cfg;
        sim.fleet_size = trials_per_contract;
        sim.speed_low = own.speed_low;
        sim.speed_high = own.speed_high;
        sim.seed = mix_seed(seed, ci);

        // Fresh run of the same uncertainty model the volumes were built from.
        const std::vector<SegmentRecord> records = simulate_route(own.route, sim);
        for (const SegmentRecord& rec : records) {
            for (std::size_t si = 0; si < rec.slices.size(); ++si) {
                const double t = rec.time_at(si);
                for (const AircraftState& s : rec.slices[si]) {
                    for (std::size_t cj = 0; cj < contracts.size(); ++cj) {
                        if (cj == ci) continue;
                        for (const OperationalVolume& ov : contracts[cj].ovs) {
                            if (ov.start > t || ov.end < t) continue;
                            for (const EllipseRegion& region : ov.regions) {
                                if (region.t_start > t || region.t_end < t) continue;
                                if (point_in_ellipse(s.position, region.derived_ellipse()))
                                    ++inclusions;
                            }
                        }
                    }
                }
            }
        }
    }
    return inclusions;
}

}  // namespace ovplan
