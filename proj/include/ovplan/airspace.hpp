#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "ovplan/contract.hpp"
#include "ovplan/geometry.hpp"

namespace ovplan {

struct Vertiport {
    std::string id;
    LocalPoint position;
};

struct NoFlyZone {
    std::string id;
    Polygon shape;
};

/// Static airspace description in the local projected frame.
struct AirspaceModel {
    GeoPoint origin;  // projection anchor
    Polygon bounds;
    std::vector<NoFlyZone> nfzs;
    std::vector<Vertiport> vertiports;

    const Vertiport& vertiport(const std::string& id) const;
    bool has_vertiport(const std::string& id) const;
    void validate() const;
};

/// Parses and validates the airspace JSON document (see docs/file_formats.md).
AirspaceModel load_airspace_json(const std::string& text);
AirspaceModel load_airspace_file(const std::string& path);

struct OvRef {
    std::string contract_id;
    std::size_t ov_index = 0;
};

/// Disjoint fixed-duration time bins; an OV spanning k bins is indexed in all k.
class TimeBinIndex {
public:
    explicit TimeBinIndex(double bin_duration = 60.0);

    void insert(const std::string& contract_id, std::size_t ov_index, double start,
                double end);
    void erase(const std::string& contract_id);

    /// Candidate references whose bins intersect [t_start, t_end]; may contain
    /// duplicates across bins, callers filter against exact OV intervals.
    std::vector<OvRef> candidates(double t_start, double t_end) const;

    double bin_duration() const { return bin_duration_; }
    std::int64_t bin_of(double t) const;
    std::size_t total_entries() const;

private:
    double bin_duration_;
    std::map<std::int64_t, std::vector<OvRef>> bins_;
};

/// Registered contracts plus the time-binned OV index. Reads are shared,
/// writes exclusive; a query never observes a partially inserted contract.
class ContractStore {
public:
    explicit ContractStore(double bin_duration = 60.0);

    /// Stores the contract under its id (a generated id when empty) and indexes
    /// every OV into the bins it overlaps. Throws on duplicate id.
    std::string register_contract(Contract c);
    void remove_contract(const std::string& id);

    /// All OVs (with owning contract id) whose [start, end] intersects
    /// [t_start, t_end], closed-interval semantics, no duplicates.
    std::vector<std::pair<std::string, OperationalVolume>> query_interval(
        double t_start, double t_end) const;

    bool contains(const std::string& id) const;
    Contract get(const std::string& id) const;
    std::vector<std::string> contract_ids() const;
    std::size_t size() const;
    double bin_duration() const { return index_.bin_duration(); }
    std::size_t index_entries() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, Contract> contracts_;
    TimeBinIndex index_;
    std::uint64_t next_auto_id_ = 0;
};

}  // namespace ovplan
