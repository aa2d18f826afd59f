#include "ovplan/airspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ovplan {

using nlohmann::json;

const Vertiport& AirspaceModel::vertiport(const std::string& id) const {
    for (const Vertiport& v : vertiports)
        if (v.id == id) return v;
    throw std::invalid_argument("AirspaceModel: unknown vertiport '" + id + "'");
}

bool AirspaceModel::has_vertiport(const std::string& id) const {
    return std::any_of(vertiports.begin(), vertiports.end(),
                       [&](const Vertiport& v) { return v.id == id; });
}

void AirspaceModel::validate() const {
    bounds.validate();
    if (vertiports.size() < 2)
        throw std::invalid_argument("AirspaceModel: needs at least 2 vertiports");
    for (const NoFlyZone& z : nfzs) {
        try {
            z.shape.validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("AirspaceModel: NFZ '" + z.id + "': " + e.what());
        }
        for (const LocalPoint& v : z.shape.vertices) {
            if (!point_in_polygon(v, bounds))
                throw std::invalid_argument("AirspaceModel: NFZ '" + z.id +
                                            "' extends outside bounds");
        }
    }
    for (std::size_t i = 0; i < vertiports.size(); ++i) {
        const Vertiport& v = vertiports[i];
        if (v.id.empty())
            throw std::invalid_argument("AirspaceModel: vertiport with empty id");
        for (std::size_t j = i + 1; j < vertiports.size(); ++j)
            if (vertiports[j].id == v.id)
                throw std::invalid_argument("AirspaceModel: duplicate vertiport id '" +
                                            v.id + "'");
        if (!point_in_polygon(v.position, bounds))
            throw std::invalid_argument("AirspaceModel: vertiport '" + v.id +
                                        "' outside bounds");
        for (const NoFlyZone& z : nfzs)
            if (point_in_polygon(v.position, z.shape))
                throw std::invalid_argument("AirspaceModel: vertiport '" + v.id +
                                            "' inside NFZ '" + z.id + "'");
    }
}

namespace {

GeoPoint parse_geo(const json& j, const std::string& what) {
    if (!j.is_object() || !j.contains("lat") || !j.contains("lon"))
        throw std::invalid_argument("airspace: " + what + " must have lat and lon");
    GeoPoint g{j.at("lat").get<double>(), j.at("lon").get<double>(),
               j.value("alt", 0.0)};
    g.validate();
    return g;
}

Polygon parse_ring(const json& j, const GeoPoint& origin, const std::string& what) {
    if (!j.is_array() || j.size() < 3)
        throw std::invalid_argument("airspace: " + what + " needs >= 3 vertices");
    Polygon p;
    for (const json& v : j) p.vertices.push_back(project(parse_geo(v, what), origin));
    // Accept either winding in the file; internal representation is CCW.
    if (distance(p.vertices.front(), p.vertices.back()) < 1e-9) p.vertices.pop_back();
    p.ensure_ccw();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("airspace: " + what + ": " + e.what());
    }
    return p;
}

}  // namespace

AirspaceModel load_airspace_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("airspace: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("origin") || !doc.contains("bounds") ||
        !doc.contains("vertiports"))
        throw std::invalid_argument("airspace: requires origin, bounds and vertiports");

    AirspaceModel model;
    model.origin = parse_geo(doc.at("origin"), "origin");
    model.bounds = parse_ring(doc.at("bounds"), model.origin, "bounds");
    for (const json& z : doc.value("nfzs", json::array())) {
        NoFlyZone nfz;
        nfz.id = z.value("id", "nfz-" + std::to_string(model.nfzs.size()));
        if (!z.contains("ring"))
            throw std::invalid_argument("airspace: NFZ '" + nfz.id + "' missing ring");
        nfz.shape = parse_ring(z.at("ring"), model.origin, "NFZ '" + nfz.id + "'");
        model.nfzs.push_back(std::move(nfz));
    }
    for (const json& v : doc.at("vertiports")) {
        if (!v.contains("id"))
            throw std::invalid_argument("airspace: vertiport missing id");
        model.vertiports.push_back(
            {v.at("id").get<std::string>(),
             project(parse_geo(v, "vertiport '" + v.at("id").get<std::string>() + "'"),
                     model.origin)});
    }
    model.validate();
    return model;
}

AirspaceModel load_airspace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("airspace: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_airspace_json(ss.str());
}

TimeBinIndex::TimeBinIndex(double bin_duration) : bin_duration_(bin_duration) {
    if (!(bin_duration > 0.0))
        throw std::invalid_argument("TimeBinIndex: bin_duration must be positive");
}

std::int64_t TimeBinIndex::bin_of(double t) const {
    return static_cast<std::int64_t>(std::floor(t / bin_duration_));
}

void TimeBinIndex::insert(const std::string& contract_id, std::size_t ov_index,
                          double start, double end) {
    if (!(start <= end)) throw std::invalid_argument("TimeBinIndex: start > end");
    for (std::int64_t b = bin_of(start); b <= bin_of(end); ++b)
        bins_[b].push_back({contract_id, ov_index});
}

void TimeBinIndex::erase(const std::string& contract_id) {
    for (auto it = bins_.begin(); it != bins_.end();) {
        auto& refs = it->second;
        refs.erase(std::remove_if(refs.begin(), refs.end(),
                                  [&](const OvRef& r) { return r.contract_id == contract_id; }),
                   refs.end());
        it = refs.empty() ? bins_.erase(it) : std::next(it);
    }
}

std::vector<OvRef> TimeBinIndex::candidates(double t_start, double t_end) const {
    std::vector<OvRef> out;
    const std::int64_t lo = bin_of(t_start);
    const std::int64_t hi = bin_of(t_end);
    for (auto it = bins_.lower_bound(lo); it != bins_.end() && it->first <= hi; ++it)
        out.insert(out.end(), it->second.begin(), it->second.end());
    return out;
}

std::size_t TimeBinIndex::total_entries() const {
    std::size_t n = 0;
    for (const auto& [bin, refs] : bins_) n += refs.size();
    return n;
}

ContractStore::ContractStore(double bin_duration) : index_(bin_duration) {}

std::string ContractStore::register_contract(Contract c) {
    std::unique_lock lock(mutex_);
    if (c.id.empty()) c.id = "contract-" + std::to_string(next_auto_id_++);
    if (contracts_.count(c.id))
        throw std::invalid_argument("ContractStore: duplicate contract id '" + c.id + "'");
    c.validate();
    for (std::size_t i = 0; i < c.ovs.size(); ++i)
        index_.insert(c.id, i, c.ovs[i].start, c.ovs[i].end);
    const std::string id = c.id;
    contracts_.emplace(id, std::move(c));
    return id;
}

void ContractStore::remove_contract(const std::string& id) {
    std::unique_lock lock(mutex_);
    if (contracts_.erase(id) == 0)
        throw std::invalid_argument("ContractStore: unknown contract id '" + id + "'");
    index_.erase(id);
}

std::vector<std::pair<std::string, OperationalVolume>> ContractStore::query_interval(
    double t_start, double t_end) const {
    if (!(t_start <= t_end))
        throw std::invalid_argument("ContractStore: query requires t_start <= t_end");
    std::shared_lock lock(mutex_);
    std::vector<std::pair<std::string, OperationalVolume>> out;
    std::vector<std::pair<std::string, std::size_t>> seen;
    for (const OvRef& ref : index_.candidates(t_start, t_end)) {
        const std::pair<std::string, std::size_t> key{ref.contract_id, ref.ov_index};
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        const Contract& c = contracts_.at(ref.contract_id);
        const OperationalVolume& ov = c.ovs.at(ref.ov_index);
        if (ov.start <= t_end && ov.end >= t_start) out.emplace_back(ref.contract_id, ov);
    }
    return out;
}

bool ContractStore::contains(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return contracts_.count(id) > 0;
}

Contract ContractStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = contracts_.find(id);
    if (it == contracts_.end())
        throw std::invalid_argument("ContractStore: unknown contract id '" + id + "'");
    return it->second;
}

std::vector<std::string> ContractStore::contract_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> ids;
    ids.reserve(contracts_.size());
    for (const auto& [id, c] : contracts_) ids.push_back(id);
    return ids;
}

std::size_t ContractStore::size() const {
    std::shared_lock lock(mutex_);
    return contracts_.size();
}

std::size_t ContractStore::index_entries() const {
    std::shared_lock lock(mutex_);
    return index_.total_entries();
}

}  // namespace ovplan
