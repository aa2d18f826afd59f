#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovplan/airspace.hpp"
#include "ovplan/flightsim.hpp"
#include "ovplan/ovgen.hpp"
#include "ovplan/router.hpp"

namespace ovplan {

struct ConflictPair {
    std::string contract_a;
    std::string contract_b;
    std::size_t ov_a = 0;
    std::size_t ov_b = 0;
    std::size_t region_a = 0;
    std::size_t region_b = 0;
    double overlap_start = 0.0;
    double overlap_end = 0.0;
};

struct ConflictReport {
    std::vector<ConflictPair> pairs;
    bool clear() const { return pairs.empty(); }
};

/// Pairwise deconfliction check of all registered contracts: any two regions
/// of distinct contracts with overlapping (closed) time intervals whose
/// derived ellipses overlap are recorded as a conflict.
ConflictReport check_contracts(const ContractStore& store);

struct OvAccuracy {
    std::size_t ov_index = 0;
    std::size_t total = 0;
    std::size_t included = 0;
};

struct AccuracyReport {
    std::size_t total_records = 0;
    std::size_t included_records = 0;
    double accuracy = 0.0;  // included / total
    std::vector<OvAccuracy> per_ov;
};

/// Re-simulates `trials` aircraft over the contract's route with the
/// contract's uncertainty band and counts the 1-second records lying inside
/// some time-valid region's derived ellipse.
AccuracyReport check_accuracy(const Contract& contract, const SimConfig& cfg, int trials);

struct ScheduleEntry {
    std::string contract_id;
    std::string origin;
    std::string destination;
    double requested_departure = 0.0;
    double granted_departure = 0.0;
    double plan_seconds = 0.0;  // wall time of the plan call
    double route_length = 0.0;
    std::size_t ov_count = 0;
};

struct CongestedConfig {
    int target_contracts = 31;
    double window = 300.0;      // departure window, seconds
    double retry_step = 30.0;   // departure retry interval, seconds
    double speed_low = 13.0;    // cruise speed draw band, m/s
    double speed_high = 20.0;
    double speed_band = 2.0;    // half-width of each flight's uncertainty band
    std::uint64_t seed = 0;
    RouterConfig router;
    SimConfig sim;
    OvGenConfig ovgen;
};

struct CongestedResult {
    std::vector<ScheduleEntry> schedule;
    ConflictReport report;
};

/// Progressive congested-environment scenario: Poisson-process departures over
/// the window, uniform vertiport pairs, each flight planned against all prior
/// contracts, with 30-second departure retries and pair redraws on failure.
/// The final store must check clear.
CongestedResult run_congested(const AirspaceModel& airspace, ContractStore& store,
                              const CongestedConfig& cfg);

/// Joint re-simulation: flies a fresh fleet per contract and counts records
/// falling inside any time-valid region of a *different* contract.
std::size_t cross_check_foreign_inclusions(const ContractStore& store, const SimConfig& cfg,
                                           int trials_per_contract, std::uint64_t seed);

}  // namespace ovplan
