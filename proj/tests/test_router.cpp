#include <doctest.h>

#include <cmath>

#include "ovplan/router.hpp"
#include "support/oracles.hpp"

using namespace ovplan;
using namespace ovplan::testing;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
    return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

AirspaceModel simple_airspace(std::vector<NoFlyZone> nfzs = {}) {
    AirspaceModel m;
    m.origin = {52.0, 0.1, 0.0};
    m.bounds = rect(-10000, -10000, 10000, 10000);
    m.nfzs = std::move(nfzs);
    m.vertiports = {{"A", {-8000, 0}}, {"B", {8000, 0}}, {"C", {0, 8000}}};
    m.validate();
    return m;
}

// Contract whose single region sits at `mean` with isotropic sigma, valid on
// [t0, t1], for exercising the conflict terms.
Contract region_contract(const std::string& id, LocalPoint mean, double sigma, double t0,
                         double t1) {
    Contract c;
    c.id = id;
    c.departure_time = t0;
    c.route.departure_time = t0;
    c.route.cruise_speed = 100.0 / (t1 - t0);
    c.route.waypoints = {{mean, t0}, {{mean.x + 100, mean.y}, t1}};
    c.route.total_length = 100.0;
    OperationalVolume ov;
    ov.start = t0;
    ov.end = t1;
    ov.regions.push_back({mean, sigma * sigma, 0.0, sigma * sigma, 2.0, t0, t1});
    c.ovs.push_back(ov);
    return c;
}

bool routes_equal(const Route& a, const Route& b) {
    if (a.waypoints.size() != b.waypoints.size()) return false;
    for (std::size_t i = 0; i < a.waypoints.size(); ++i) {
        if (a.waypoints[i].position.x != b.waypoints[i].position.x) return false;
        if (a.waypoints[i].position.y != b.waypoints[i].position.y) return false;
        if (a.waypoints[i].eta != b.waypoints[i].eta) return false;
    }
    return a.total_length == b.total_length;
}

}  // namespace

TEST_CASE("RouterConfig validation") {
    RouterConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    RouterConfig bad = cfg;
    bad.heuristic_weight = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.heuristic_weight = 1.6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.dedup_radius = cfg.arc_radius;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.arc_children = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.conflict_samples = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("arc_candidates: fan about a heading") {
    RouterConfig cfg;
    cfg.arc_radius = 500.0;
    cfg.arc_angle = kPi / 2.0;
    cfg.arc_children = 5;  // 22.5 degree spacing
    const LocalPoint pos{100, 200};
    const double heading = 0.3;
    const auto cands = arc_candidates(pos, heading, cfg);
    REQUIRE(cands.size() == 5);
    for (std::size_t k = 0; k < cands.size(); ++k) {
        CHECK(distance(pos, cands[k]) == doctest::Approx(500.0).epsilon(1e-12));
        const double want = heading - kPi / 4.0 + k * (kPi / 8.0);
        const double got = std::atan2(cands[k].y - pos.y, cands[k].x - pos.x);
        CHECK(normalize_angle(got - want) == doctest::Approx(0.0).epsilon(1e-9));
    }
    // Middle candidate continues straight ahead.
    const double mid = std::atan2(cands[2].y - pos.y, cands[2].x - pos.x);
    CHECK(normalize_angle(mid - heading) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("arc_candidates: root expansion is a full fan at the same spacing") {
    RouterConfig cfg;
    cfg.arc_angle = kPi / 2.0;
    cfg.arc_children = 5;  // 22.5 degrees -> 16 directions
    const auto cands = arc_candidates({0, 0}, std::nullopt, cfg);
    REQUIRE(cands.size() == 16);
    for (std::size_t k = 0; k < cands.size(); ++k) {
        const double got = std::atan2(cands[k].y, cands[k].x);
        CHECK(normalize_angle(got - k * (kPi / 8.0)) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("angle_set signs and magnitudes") {
    // Square ahead of n, corners symmetric about the n -> goal ray.
    const Polygon sq = rect(5, -0.5, 10, 0.5);
    const auto angles = angle_set({0, 0}, {10, 0}, sq);
    REQUIRE(angles.size() == 4);
    // Vertex (5, -0.5) is right of the ray: positive angle atan2(0.5, 5).
    CHECK(angles[0] == doctest::Approx(std::atan2(0.5, 5.0)));
    // Vertex (10, -0.5): positive, atan2(0.5, 10) ~ 0.04996.
    CHECK(angles[1] == doctest::Approx(std::atan2(0.5, 10.0)));
    CHECK(angles[1] == doctest::Approx(0.049958).epsilon(1e-4));
    // Left-side vertices mirror negative.
    CHECK(angles[2] == doctest::Approx(-std::atan2(0.5, 10.0)));
    CHECK(angles[3] == doctest::Approx(-std::atan2(0.5, 5.0)));
}

TEST_CASE("heuristic: clear line of sight is weighted straight-line distance") {
    const AirspaceModel m = simple_airspace();
    RouterConfig cfg;
    cfg.heuristic_weight = 1.2;
    CHECK(heuristic({-8000, 0}, {8000, 0}, m, cfg) == doctest::Approx(1.2 * 16000.0));
    CHECK(heuristic({7000, 0}, {8000, 0}, m, cfg) == doctest::Approx(1200.0));
}

TEST_CASE("heuristic: blocked sight detours through an extreme vertex") {
    const AirspaceModel m = simple_airspace({{"wall", rect(400, -100, 600, 100)}});
    RouterConfig cfg;
    cfg.heuristic_weight = 1.2;
    const LocalPoint n{0, 0};
    const LocalPoint goal{1000, 0};
    // Symmetric blocker: both extreme corners give the same detour.
    const double detour =
        distance(n, {400, 100}) + distance({400, 100}, goal);
    CHECK(heuristic(n, goal, m, cfg) == doctest::Approx(1.2 * detour));
    // Asymmetric viewpoint: the smaller |angle| side wins.
    const LocalPoint n2{0, 60};
    const double via_top = distance(n2, {400, 100}) + distance({400, 100}, goal);
    CHECK(heuristic(n2, goal, m, cfg) == doctest::Approx(1.2 * via_top));
    // Heuristic never exceeds omega times the true shortest path.
    const double oracle = grid_shortest_path(m, n, goal, 0.0, 50.0);
    CHECK(heuristic(n, goal, m, cfg) <= 1.2 * oracle + 1e-6);
}

TEST_CASE("conflict_delta: empty store and exact hits") {
    const RouterConfig cfg;
    ContractStore store;
    CHECK(conflict_delta({0, 0}, 0.0, {150, 0}, 10.0, store, cfg) == 0.0);

    // Region centered exactly on the segment end: peak density, delta = 1.
    store.register_contract(region_contract("hit", {150, 0}, 75.0, 0.0, 100.0));
    CHECK(conflict_delta({0, 0}, 0.0, {150, 0}, 10.0, store, cfg) == doctest::Approx(1.0));
}

TEST_CASE("conflict_delta: two-sigma miss decays to exp(-2)") {
    const RouterConfig cfg;  // 16 samples, segment length 150 -> sample every 10 m
    ContractStore store;
    store.register_contract(region_contract("near", {300, 0}, 75.0, 0.0, 100.0));
    // Closest sample is (150, 0): mahalanobis 150/75 = 2.
    CHECK(conflict_delta({0, 0}, 0.0, {150, 0}, 10.0, store, cfg) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("conflict_delta: regions outside the edge's time window are ignored") {
    const RouterConfig cfg;
    ContractStore store;
    store.register_contract(region_contract("later", {80, 0}, 75.0, 500.0, 600.0));
    CHECK(conflict_delta({0, 0}, 0.0, {150, 0}, 10.0, store, cfg) == 0.0);
    // The same geometry within the window registers.
    CHECK(conflict_delta({0, 0}, 510.0, {150, 0}, 520.0, store, cfg) ==
          doctest::Approx(1.0));
}

TEST_CASE("classify_connection verdicts") {
    const AirspaceModel m = simple_airspace({{"wall", rect(-500, -2000, 500, 2000)}});
    RouterConfig cfg;  // nfz_clearance = 50
    ContractStore store;

    CHECK(classify_connection({-2000, 0}, 0.0, {12000, 0}, 10.0, m, store, cfg) ==
          ConnectionResult::InvalidNode);  // endpoint outside bounds
    CHECK(classify_connection({-2000, 0}, 0.0, {0, 0}, 10.0, m, store, cfg) ==
          ConnectionResult::InvalidNode);  // endpoint inside the NFZ
    CHECK(classify_connection({-2000, 0}, 0.0, {-540, 0}, 10.0, m, store, cfg) ==
          ConnectionResult::InvalidNode);  // endpoint within clearance
    CHECK(classify_connection({-2000, 0}, 0.0, {2000, 0}, 10.0, m, store, cfg) ==
          ConnectionResult::InvalidConnection);  // crosses the NFZ
    CHECK(classify_connection({-2000, 2030}, 0.0, {2000, 2030}, 10.0, m, store, cfg) ==
          ConnectionResult::InvalidConnection);  // clearance violated mid-segment
    CHECK(classify_connection({-2000, 2100}, 0.0, {2000, 2100}, 10.0, m, store, cfg) ==
          ConnectionResult::Valid);

    // OV blocking: region on the path within d_min during the edge's window.
    store.register_contract(region_contract("blocker", {0, 5000}, 50.0, 0.0, 100.0));
    CHECK(classify_connection({-2000, 5000}, 0.0, {2000, 5000}, 10.0, m, store, cfg) ==
          ConnectionResult::InvalidConnection);
    // Same edge outside the region's validity window is fine.
    CHECK(classify_connection({-2000, 5000}, 500.0, {2000, 5000}, 510.0, m, store, cfg) ==
          ConnectionResult::Valid);
}

TEST_CASE("plan: clear line of sight gives the direct two-waypoint route") {
    const AirspaceModel m = simple_airspace();
    ContractStore store;
    const RouterConfig cfg;
    const Route r = plan(m, store, "A", "B", 100.0, cfg);
    REQUIRE(r.waypoints.size() == 2);
    CHECK(r.total_length == doctest::Approx(16000.0));
    CHECK(r.departure_time == 100.0);
    CHECK(r.waypoints.front().eta == doctest::Approx(100.0));
    CHECK(r.waypoints.back().eta == doctest::Approx(100.0 + 16000.0 / cfg.cruise_speed));
}

TEST_CASE("plan: routes around a wall close to the shortest possible detour") {
    const AirspaceModel m = simple_airspace({{"wall", rect(-500, -6000, 500, 6000)}});
    ContractStore store;
    const RouterConfig cfg;
    const Route r = plan(m, store, "A", "B", 0.0, cfg);
    CHECK(r.total_length > 16000.0);
    const double oracle =
        grid_shortest_path(m, {-8000, 0}, {8000, 0}, cfg.nfz_clearance, 50.0);
    CHECK(r.total_length <= cfg.heuristic_weight * oracle * 1.02);
    // The route respects clearance everywhere.
    for (std::size_t i = 0; i + 1 < r.waypoints.size(); ++i)
        CHECK(segment_polygon_clearance(r.waypoints[i].position, r.waypoints[i + 1].position,
                                        m.nfzs[0].shape) >= cfg.nfz_clearance - 1e-9);
}

TEST_CASE("plan: fixture routes beat the suboptimality bound") {
    const AirspaceModel m = load_airspace_file(fixture_path("airspace_fixture.json"));
    ContractStore store;
    const RouterConfig cfg;
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"0", "4"}, {"7", "3"}, {"1", "5"}};
    for (const auto& [from, to] : pairs) {
        CAPTURE(from);
        CAPTURE(to);
        const Route r = plan(m, store, from, to, 0.0, cfg);
        const double oracle = grid_shortest_path(m, m.vertiport(from).position,
                                                 m.vertiport(to).position, cfg.nfz_clearance,
                                                 50.0);
        REQUIRE(std::isfinite(oracle));
        CHECK(r.total_length >= distance(m.vertiport(from).position, m.vertiport(to).position) -
                                    1e-6);
        CHECK(r.total_length <= cfg.heuristic_weight * oracle * 1.02);
    }
}

TEST_CASE("plan: conflict penalty pushes the route away from a standing OV") {
    const AirspaceModel m = simple_airspace();
    const RouterConfig cfg;
    // A long-lived region square on the direct path.
    ContractStore store;
    store.register_contract(region_contract("camper", {0, 0}, 300.0, 0.0, 4000.0));
    const Route r = plan(m, store, "A", "B", 0.0, cfg);
    // Every edge keeps d_min from the region's ellipse while it is active.
    const Ellipse e = store.get("camper").ovs[0].regions[0].derived_ellipse();
    for (std::size_t i = 0; i + 1 < r.waypoints.size(); ++i) {
        if (r.waypoints[i + 1].eta < 0.0 || r.waypoints[i].eta > 4000.0) continue;
        CHECK_FALSE(segment_intersects_ellipse(r.waypoints[i].position,
                                               r.waypoints[i + 1].position, e, cfg.ov_margin));
    }
    CHECK(r.total_length > 16000.0);
}

TEST_CASE("plan: identical inputs give bit-identical routes") {
    const AirspaceModel m = load_airspace_file(fixture_path("airspace_fixture.json"));
    ContractStore store;
    const RouterConfig cfg;
    const Route r1 = plan(m, store, "0", "4", 25.0, cfg);
    const Route r2 = plan(m, store, "0", "4", 25.0, cfg);
    CHECK(routes_equal(r1, r2));
}

TEST_CASE("plan: cached heuristic equals recomputed heuristic") {
    const AirspaceModel m = load_airspace_file(fixture_path("airspace_fixture.json"));
    ContractStore store;
    RouterConfig cfg;
    const Route cached = plan(m, store, "7", "3", 0.0, cfg);
    cfg.disable_heuristic_cache = true;
    const Route fresh = plan(m, store, "7", "3", 0.0, cfg);
    CHECK(routes_equal(cached, fresh));
}

TEST_CASE("plan: unreachable destination raises NoRouteFound") {
    // A wall spanning the full bounds height splits the airspace.
    const AirspaceModel m = simple_airspace({{"wall", rect(1000, -10000, 2000, 10000)}});
    ContractStore store;
    const RouterConfig cfg;
    try {
        plan(m, store, "A", "B", 0.0, cfg);
        FAIL("expected NoRouteFound");
    } catch (const NoRouteFound& e) {
        CHECK(e.nodes_expanded > 0);
        CHECK(std::string(e.what()).find("A") != std::string::npos);
    }
    CHECK_THROWS_AS(plan(m, store, "A", "A", 0.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(plan(m, store, "A", "nope", 0.0, cfg), std::invalid_argument);
}
