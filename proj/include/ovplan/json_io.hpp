#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ovplan/airspace.hpp"
#include "ovplan/contract.hpp"
#include "ovplan/verify.hpp"

namespace ovplan {

// Route and contract files carry geographic coordinates; the projection origin
// of the owning airspace converts to and from the local frame.

nlohmann::json route_to_json(const Route& route, const GeoPoint& origin);
Route route_from_json(const nlohmann::json& j, const GeoPoint& origin);

nlohmann::json contract_to_json(const Contract& contract, const GeoPoint& origin);
Contract contract_from_json(const nlohmann::json& j, const GeoPoint& origin);

/// GeoJSON LineString of the route for plotting.
nlohmann::json route_to_geojson(const Route& route, const GeoPoint& origin);
/// GeoJSON FeatureCollection of every derived ellipse as a 64-gon.
nlohmann::json contract_to_geojson(const Contract& contract, const GeoPoint& origin);

nlohmann::json conflict_report_to_json(const ConflictReport& report);
nlohmann::json accuracy_report_to_json(const AccuracyReport& report);

/// Schedule log CSV (header + one line per granted contract).
std::string schedule_to_csv(const std::vector<ScheduleEntry>& schedule);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ovplan
