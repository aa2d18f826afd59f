#include "ovplan/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ovplan {

using nlohmann::json;

namespace {

json geo_json(LocalPoint p, const GeoPoint& origin) {
    const GeoPoint g = unproject(p, origin);
    return json{{"lat", g.lat}, {"lon", g.lon}};
}

LocalPoint local_from(const json& j, const GeoPoint& origin) {
    return project({j.at("lat").get<double>(), j.at("lon").get<double>()}, origin);
}

json geojson_coord(LocalPoint p, const GeoPoint& origin) {
    const GeoPoint g = unproject(p, origin);
    return json::array({g.lon, g.lat});
}

}  // namespace

json route_to_json(const Route& route, const GeoPoint& origin) {
    json waypoints = json::array();
    for (const RouteWaypoint& w : route.waypoints) {
        json wp = geo_json(w.position, origin);
        wp["eta"] = w.eta;
        waypoints.push_back(wp);
    }
    return json{{"waypoints", waypoints},
                {"total_length", route.total_length},
                {"departure_time", route.departure_time},
                {"cruise_speed", route.cruise_speed}};
}

Route route_from_json(const json& j, const GeoPoint& origin) {
    Route route;
    route.departure_time = j.at("departure_time").get<double>();
    route.cruise_speed = j.at("cruise_speed").get<double>();
    for (const json& wp : j.at("waypoints"))
        route.waypoints.push_back({local_from(wp, origin), wp.at("eta").get<double>()});
    // Recompute instead of trusting the file, then cross-check.
    double cum = 0.0;
    for (std::size_t i = 1; i < route.waypoints.size(); ++i)
        cum += distance(route.waypoints[i - 1].position, route.waypoints[i].position);
    route.total_length = cum;
    const double stored = j.at("total_length").get<double>();
    if (std::abs(stored - cum) > 1e-3 * std::max(1.0, cum))
        throw std::invalid_argument("route: stored total_length inconsistent with waypoints");
    return route;
}

json contract_to_json(const Contract& contract, const GeoPoint& origin) {
    json ovs = json::array();
    for (const OperationalVolume& ov : contract.ovs) {
        json regions = json::array();
        for (const EllipseRegion& r : ov.regions) {
            regions.push_back(json{{"mean", geo_json(r.mean, origin)},
                                   {"cov", json::array({r.cov_xx, r.cov_xy, r.cov_yy})},
                                   {"z", r.z},
                                   {"t_start", r.t_start},
                                   {"t_end", r.t_end},
                                   {"regularized", r.regularized}});
        }
        ovs.push_back(json{{"start", ov.start}, {"end", ov.end}, {"regions", regions}});
    }
    return json{{"id", contract.id},
                {"departure_time", contract.departure_time},
                {"cruise_speed", contract.route.cruise_speed},
                {"speed_low", contract.speed_low},
                {"speed_high", contract.speed_high},
                {"route", route_to_json(contract.route, origin)},
                {"ovs", ovs}};
}

Contract contract_from_json(const json& j, const GeoPoint& origin) {
    Contract contract;
    contract.id = j.at("id").get<std::string>();
    contract.departure_time = j.at("departure_time").get<double>();
    contract.speed_low = j.value("speed_low", 13.0);
    contract.speed_high = j.value("speed_high", 17.0);
    contract.route = route_from_json(j.at("route"), origin);
    for (const json& jov : j.at("ovs")) {
        OperationalVolume ov;
        ov.start = jov.at("start").get<double>();
        ov.end = jov.at("end").get<double>();
        for (const json& jr : jov.at("regions")) {
            EllipseRegion r;
            r.mean = local_from(jr.at("mean"), origin);
            const json& cov = jr.at("cov");
            r.cov_xx = cov.at(0).get<double>();
            r.cov_xy = cov.at(1).get<double>();
            r.cov_yy = cov.at(2).get<double>();
            r.z = jr.at("z").get<double>();
            r.t_start = jr.at("t_start").get<double>();
            r.t_end = jr.at("t_end").get<double>();
            r.regularized = jr.value("regularized", false);
            ov.regions.push_back(r);
        }
        contract.ovs.push_back(std::move(ov));
    }
    contract.validate();
    return contract;
}

json route_to_geojson(const Route& route, const GeoPoint& origin) {
    json coords = json::array();
    for (const RouteWaypoint& w : route.waypoints)
        coords.push_back(geojson_coord(w.position, origin));
    return json{{"type", "Feature"},
                {"properties",
                 {{"total_length_m", route.total_length},
                  {"departure_time_s", route.departure_time},
                  {"cruise_speed_mps", route.cruise_speed}}},
                {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
}

json contract_to_geojson(const Contract& contract, const GeoPoint& origin) {
    json features = json::array();
    for (std::size_t i = 0; i < contract.ovs.size(); ++i) {
        for (std::size_t k = 0; k < contract.ovs[i].regions.size(); ++k) {
            const EllipseRegion& r = contract.ovs[i].regions[k];
            json ring = json::array();
            const std::vector<LocalPoint> boundary = ellipse_boundary(r.derived_ellipse(), 64);
            for (const LocalPoint& p : boundary) ring.push_back(geojson_coord(p, origin));
            ring.push_back(ring.front());  // closed ring
            features.push_back(
                json{{"type", "Feature"},
                     {"properties",
                      {{"contract", contract.id},
                       {"ov", i},
                       {"region", k},
                       {"t_start", r.t_start},
                       {"t_end", r.t_end}}},
                     {"geometry",
                      {{"type", "Polygon"}, {"coordinates", json::array({ring})}}}});
        }
    }
    features.push_back(route_to_geojson(contract.route, origin));
    return json{{"type", "FeatureCollection"}, {"features", features}};
}

json conflict_report_to_json(const ConflictReport& report) {
    json pairs = json::array();
    for (const ConflictPair& p : report.pairs) {
        pairs.push_back(json{{"contract_a", p.contract_a},
                             {"contract_b", p.contract_b},
                             {"ov_a", p.ov_a},
                             {"ov_b", p.ov_b},
                             {"region_a", p.region_a},
                             {"region_b", p.region_b},
                             {"overlap_start", p.overlap_start},
                             {"overlap_end", p.overlap_end}});
    }
    return json{{"clear", report.clear()}, {"pairs", pairs}};
}

json accuracy_report_to_json(const AccuracyReport& report) {
    json per_ov = json::array();
    for (const OvAccuracy& a : report.per_ov) {
        per_ov.push_back(json{{"ov_index", a.ov_index},
                              {"total", a.total},
                              {"included", a.included}});
    }
    return json{{"total_records", report.total_records},
                {"included_records", report.included_records},
                {"accuracy", report.accuracy},
                {"per_ov", per_ov}};
}

std::string schedule_to_csv(const std::vector<ScheduleEntry>& schedule) {
    std::ostringstream out;
    out << "contract_id,origin,destination,requested_departure,granted_departure,"
           "plan_seconds,route_length,ov_count\n";
    for (const ScheduleEntry& e : schedule) {
        out << e.contract_id << ',' << e.origin << ',' << e.destination << ','
            << e.requested_departure << ',' << e.granted_departure << ',' << e.plan_seconds
            << ',' << e.route_length << ',' << e.ov_count << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ovplan
