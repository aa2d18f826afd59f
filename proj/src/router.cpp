#include "ovplan/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

namespace ovplan {

void RouterConfig::validate() const {
    if (!(arc_radius > 0.0))
        throw std::invalid_argument("RouterConfig: arc_radius must be positive");
    if (!(arc_angle > 0.0 && arc_angle <= 2.0 * kPi))
        throw std::invalid_argument("RouterConfig: arc_angle must be in (0, 2*pi]");
    if (arc_children < 2)
        throw std::invalid_argument("RouterConfig: arc_children must be >= 2");
    if (!(dedup_radius > 0.0 && dedup_radius < arc_radius))
        throw std::invalid_argument("RouterConfig: dedup_radius must be in (0, arc_radius)");
    if (!(heuristic_weight >= 1.1 && heuristic_weight <= 1.5))
        throw std::invalid_argument("RouterConfig: heuristic_weight must be in [1.1, 1.5]");
    if (!(conflict_penalty >= 0.0))
        throw std::invalid_argument("RouterConfig: conflict_penalty must be >= 0");
    if (!(cruise_speed > 0.0))
        throw std::invalid_argument("RouterConfig: cruise_speed must be positive");
    if (!(ov_margin >= 0.0))
        throw std::invalid_argument("RouterConfig: ov_margin must be >= 0");
    if (!(nfz_clearance >= 0.0))
        throw std::invalid_argument("RouterConfig: nfz_clearance must be >= 0");
    if (conflict_samples < 2)
        throw std::invalid_argument("RouterConfig: conflict_samples must be >= 2");
}

std::vector<LocalPoint> arc_candidates(LocalPoint position, std::optional<double> heading,
                                       const RouterConfig& cfg) {
    std::vector<LocalPoint> out;
    const double spacing = cfg.arc_angle / (cfg.arc_children - 1);
    if (heading) {
        out.reserve(static_cast<std::size_t>(cfg.arc_children));
        for (int k = 0; k < cfg.arc_children; ++k) {
            const double a = *heading - cfg.arc_angle / 2.0 + k * spacing;
            out.push_back({position.x + cfg.arc_radius * std::cos(a),
                           position.y + cfg.arc_radius * std::sin(a)});
        }
    } else {
        // Root expansion: full fan at the same angular spacing.
        const int m = std::max(1, static_cast<int>(std::llround(2.0 * kPi / spacing)));
        out.reserve(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            const double a = k * (2.0 * kPi / m);
            out.push_back({position.x + cfg.arc_radius * std::cos(a),
                           position.y + cfg.arc_radius * std::sin(a)});
        }
    }
    return out;
}

std::vector<double> angle_set(LocalPoint n, LocalPoint goal, const Polygon& poly) {
    const double goal_angle = std::atan2(goal.y - n.y, goal.x - n.x);
    std::vector<double> out;
    out.reserve(poly.vertices.size());
    for (const LocalPoint& v : poly.vertices) {
        const double a = std::atan2(v.y - n.y, v.x - n.x);
        // Positive when the vertex lies to the right of the n -> goal ray.
        out.push_back(normalize_angle(goal_angle - a));
    }
    return out;
}

namespace {

// Distance from a to the first crossing of segment ab with the polygon, when
// the segment intersects it.
std::optional<double> first_block_distance(LocalPoint a, LocalPoint b, const Polygon& poly) {
    if (!segment_intersects_polygon(a, b, poly)) return std::nullopt;
    if (point_in_polygon(a, poly)) return 0.0;
    const LocalPoint d1 = b - a;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t nv = poly.vertices.size();
    for (std::size_t i = 0; i < nv; ++i) {
        const LocalPoint c = poly.vertices[i];
        const LocalPoint d = poly.vertices[(i + 1) % nv];
        const LocalPoint d2 = d - c;
        const double denom = cross(d1, d2);
        if (std::abs(denom) < 1e-18) continue;
        const double t = cross(c - a, d2) / denom;
        const double s = cross(c - a, d1) / denom;
        if (t >= -1e-12 && t <= 1.0 + 1e-12 && s >= -1e-12 && s <= 1.0 + 1e-12)
            best = std::min(best, std::max(0.0, t) * d1.norm());
    }
    if (!std::isfinite(best)) best = point_polygon_distance(a, poly);
    return best;
}

}  // namespace

double heuristic(LocalPoint n, LocalPoint goal, const AirspaceModel& airspace,
                 const RouterConfig& cfg) {
    const NoFlyZone* blocking = nullptr;
    double block_dist = std::numeric_limits<double>::infinity();
    for (const NoFlyZone& z : airspace.nfzs) {
        const std::optional<double> d = first_block_distance(n, goal, z.shape);
        if (d && *d < block_dist) {
            block_dist = *d;
            blocking = &z;
        }
    }
    if (blocking == nullptr) return cfg.heuristic_weight * distance(n, goal);

    const std::vector<double> angles = angle_set(n, goal, blocking->shape);
    std::size_t imin = 0;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < angles.size(); ++i) {
        if (angles[i] < angles[imin]) imin = i;
        if (angles[i] > angles[imax]) imax = i;
    }
    const auto detour = [&](std::size_t i) {
        const LocalPoint v = blocking->shape.vertices[i];
        return distance(n, v) + distance(v, goal);
    };
    std::size_t pick;
    const double diff = std::abs(angles[imin]) - std::abs(angles[imax]);
    if (std::abs(diff) < 1e-12) {
        pick = detour(imin) <= detour(imax) ? imin : imax;
    } else {
        pick = diff < 0.0 ? imin : imax;
    }
    return cfg.heuristic_weight * detour(pick);
}

double conflict_delta(LocalPoint a, double eta_a, LocalPoint b, double eta_b,
                      const ContractStore& store, const RouterConfig& cfg) {
    const auto ovs = store.query_interval(eta_a, eta_b);
    if (ovs.empty()) return 0.0;
    double worst = 0.0;
    const int k = cfg.conflict_samples;
    for (const auto& [cid, ov] : ovs) {
        for (const EllipseRegion& region : ov.regions) {
            if (region.t_start > eta_b || region.t_end < eta_a) continue;
            const double det = region.cov_xx * region.cov_yy - region.cov_xy * region.cov_xy;
            if (!(det > 0.0)) return 1.0;  // singular: maximally penalized
            for (int i = 0; i < k; ++i) {
                const double t = static_cast<double>(i) / (k - 1);
                const LocalPoint p = a + (b - a) * t;
                const double m = region.mahalanobis(p);
                worst = std::max(worst, std::exp(-0.5 * m * m));
            }
        }
    }
    return worst;
}

ConnectionResult classify_connection(LocalPoint a, double eta_a, LocalPoint b,
                                     double eta_b, const AirspaceModel& airspace,
                                     const ContractStore& store, const RouterConfig& cfg) {
    if (!point_in_polygon(b, airspace.bounds)) return ConnectionResult::InvalidNode;
    for (const NoFlyZone& z : airspace.nfzs) {
        if (point_in_polygon(b, z.shape) ||
            point_polygon_distance(b, z.shape) < cfg.nfz_clearance)
            return ConnectionResult::InvalidNode;
    }
    // Leaving the (convex or concave) operational area means crossing its ring.
    const std::size_t nb = airspace.bounds.vertices.size();
    for (std::size_t i = 0; i < nb; ++i) {
        if (segments_intersect(a, b, airspace.bounds.vertices[i],
                               airspace.bounds.vertices[(i + 1) % nb]))
            return ConnectionResult::InvalidConnection;
    }
    for (const NoFlyZone& z : airspace.nfzs) {
        if (segment_intersects_polygon(a, b, z.shape))
            return ConnectionResult::InvalidConnection;
        if (segment_polygon_clearance(a, b, z.shape) < cfg.nfz_clearance)
            return ConnectionResult::InvalidConnection;
    }
    for (const auto& [cid, ov] : store.query_interval(eta_a, eta_b)) {
        for (const EllipseRegion& region : ov.regions) {
            if (region.t_start > eta_b || region.t_end < eta_a) continue;
            if (segment_intersects_ellipse(a, b, region.derived_ellipse(), cfg.ov_margin))
                return ConnectionResult::InvalidConnection;
        }
    }
    return ConnectionResult::Valid;
}

namespace {

struct QueueEntry {
    double f;
    double g;
    std::uint64_t seq;
    int index;
};

struct QueueOrder {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g > b.g;
        return a.seq > b.seq;
    }
};

// Spatial hash over node positions for dedup lookups.
class NodeGrid {
public:
    explicit NodeGrid(double cell) : cell_(cell) {}

    void add(LocalPoint p, int index) { cells_[key(p)].push_back(index); }

    // Nearest node within the dedup radius; ties break to the lowest index.
    int find(LocalPoint p, const std::vector<SearchNode>& nodes, double radius) const {
        const std::int64_t cx = coord(p.x);
        const std::int64_t cy = coord(p.y);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::int64_t ix = cx - 1; ix <= cx + 1; ++ix) {
            for (std::int64_t iy = cy - 1; iy <= cy + 1; ++iy) {
                const auto it = cells_.find(pack(ix, iy));
                if (it == cells_.end()) continue;
                for (int idx : it->second) {
                    const double d = distance(nodes[static_cast<std::size_t>(idx)].position, p);
                    if (d > radius) continue;
                    if (d < best_d - 1e-12 ||
                        (std::abs(d - best_d) <= 1e-12 && (best < 0 || idx < best))) {
                        best_d = d;
                        best = idx;
                    }
                }
            }
        }
        return best;
    }

private:
    std::int64_t coord(double v) const {
        return static_cast<std::int64_t>(std::floor(v / cell_));
    }
    static std::uint64_t pack(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y & 0xffffffff);
    }
    std::uint64_t key(LocalPoint p) const { return pack(coord(p.x), coord(p.y)); }

    double cell_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace

Route plan(const AirspaceModel& airspace, const ContractStore& store,
           const std::string& from_id, const std::string& to_id, double departure_time,
           const RouterConfig& cfg) {
    cfg.validate();
    if (from_id == to_id)
        throw std::invalid_argument("plan: origin and destination must differ");
    const LocalPoint start = airspace.vertiport(from_id).position;
    const LocalPoint goal = airspace.vertiport(to_id).position;

    std::vector<SearchNode> nodes;
    NodeGrid grid(cfg.dedup_radius);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> open;
    std::uint64_t seq = 0;
    int goal_index = -1;
    std::size_t expanded = 0;
    // Chain re-validation failures park nodes that stay claimable, so the
    // search can revisit them; the budget keeps pathological claim-park cycles
    // from spinning forever.
    int revalidation_budget = 200;

    const auto node_h = [&](int idx) {
        return cfg.disable_heuristic_cache
                   ? heuristic(nodes[static_cast<std::size_t>(idx)].position, goal, airspace, cfg)
                   : nodes[static_cast<std::size_t>(idx)].h;
    };
    const auto push_open = [&](int idx) {
        const SearchNode& n = nodes[static_cast<std::size_t>(idx)];
        open.push({n.g + node_h(idx) + cfg.conflict_penalty * n.delta, n.g, seq++, idx});
    };

    nodes.push_back({start, 0.0, heuristic(start, goal, airspace, cfg), 0.0, departure_time,
                     -1, NodeStatus::Open});
    grid.add(start, 0);
    push_open(0);

    const auto consider = [&](int parent_idx, LocalPoint candidate, bool is_goal) {
        const SearchNode parent = nodes[static_cast<std::size_t>(parent_idx)];
        int inc = is_goal ? goal_index : grid.find(candidate, nodes, cfg.dedup_radius);
        const LocalPoint target = inc >= 0 ? nodes[static_cast<std::size_t>(inc)].position
                                           : candidate;
        const double edge = distance(parent.position, target);
        if (edge < 1e-9) return;
        const double g2 = parent.g + edge;
        const double eta2 = departure_time + g2 / cfg.cruise_speed;
        const ConnectionResult res =
            classify_connection(parent.position, parent.eta, target, eta2, airspace, store, cfg);
        if (res == ConnectionResult::InvalidNode) return;
        if (res == ConnectionResult::InvalidConnection) {
            if (inc < 0) {
                // Created with a cached heuristic and parked on the closed list;
                // re-openable when reached later through a valid connection.
                nodes.push_back({target, g2, heuristic(target, goal, airspace, cfg), 0.0,
                                 eta2, parent_idx, NodeStatus::InvalidConnection});
                grid.add(target, static_cast<int>(nodes.size()) - 1);
                if (is_goal) goal_index = static_cast<int>(nodes.size()) - 1;
            }
            return;
        }
        const double delta =
            cfg.conflict_penalty > 0.0
                ? conflict_delta(parent.position, parent.eta, target, eta2, store, cfg)
                : 0.0;
        if (inc < 0) {
            nodes.push_back({target, g2, heuristic(target, goal, airspace, cfg), delta, eta2,
                             parent_idx, NodeStatus::Open});
            const int idx = static_cast<int>(nodes.size()) - 1;
            grid.add(target, idx);
            if (is_goal) goal_index = idx;
            push_open(idx);
        } else {
            SearchNode& m = nodes[static_cast<std::size_t>(inc)];
            // Claiming a node through one of its own descendants would close a
            // parent-pointer cycle (reachable because parked nodes are claimable
            // regardless of cost).
            for (int a = parent_idx; a >= 0; a = nodes[static_cast<std::size_t>(a)].parent)
                if (a == inc) return;
            // A node parked as invalid-connection carries no reachable-path cost;
            // any valid connection claims it.
            if (m.status == NodeStatus::InvalidConnection || g2 < m.g - 1e-12) {
                m.g = g2;
                m.eta = eta2;
                m.parent = parent_idx;
                m.delta = delta;
                m.status = NodeStatus::Open;
                push_open(inc);
            }
        }
    };

    while (!open.empty()) {
        const QueueEntry e = open.top();
        open.pop();
        {
            const SearchNode& n = nodes[static_cast<std::size_t>(e.index)];
            if (n.status != NodeStatus::Open || e.g != n.g) continue;  // stale entry
        }
        if (e.index == goal_index) {
            std::vector<int> chain;
            for (int i = goal_index; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent)
                chain.push_back(i);
            std::reverse(chain.begin(), chain.end());

            // Edges were classified with the ETAs in force at discovery time; a
            // later g-improvement on an ancestor shifts every descendant's true
            // ETA. Re-validate the whole chain at the final ETAs before
            // accepting the route.
            std::vector<double> cum(chain.size(), 0.0);
            for (std::size_t i = 1; i < chain.size(); ++i)
                cum[i] = cum[i - 1] +
                         distance(nodes[static_cast<std::size_t>(chain[i - 1])].position,
                                  nodes[static_cast<std::size_t>(chain[i])].position);
            const auto eta_of = [&](std::size_t i) {
                return departure_time + cum[i] / cfg.cruise_speed;
            };
            std::size_t bad = 0;  // index of the first invalid edge's child, 0 = none
            for (std::size_t i = 1; i < chain.size() && bad == 0; ++i) {
                const ConnectionResult res = classify_connection(
                    nodes[static_cast<std::size_t>(chain[i - 1])].position, eta_of(i - 1),
                    nodes[static_cast<std::size_t>(chain[i])].position, eta_of(i), airspace,
                    store, cfg);
                if (res != ConnectionResult::Valid) bad = i;
            }
            if (bad == 0) {
                Route route;
                route.departure_time = departure_time;
                route.cruise_speed = cfg.cruise_speed;
                for (std::size_t i = 0; i < chain.size(); ++i)
                    route.waypoints.push_back(
                        {nodes[static_cast<std::size_t>(chain[i])].position, eta_of(i)});
                route.total_length = cum.back();
                route.validate();
                return route;
            }
            if (--revalidation_budget < 0)
                throw NoRouteFound("plan: no certifiable route from '" + from_id +
                                       "' to '" + to_id + "'",
                                   expanded);
            // Synchronize the chain to its true costs, then park everything at
            // and past the invalid edge; parked nodes stay claimable through
            // any later valid connection.
            for (std::size_t i = 1; i < chain.size(); ++i) {
                SearchNode& m = nodes[static_cast<std::size_t>(chain[i])];
                m.g = cum[i];
                m.eta = eta_of(i);
                if (i >= bad) m.status = NodeStatus::InvalidConnection;
            }
            continue;
        }
        nodes[static_cast<std::size_t>(e.index)].status = NodeStatus::Closed;
        ++expanded;

        std::optional<double> heading;
        const SearchNode n = nodes[static_cast<std::size_t>(e.index)];
        if (n.parent >= 0) {
            const LocalPoint d = n.position - nodes[static_cast<std::size_t>(n.parent)].position;
            heading = std::atan2(d.y, d.x);
        }
        for (const LocalPoint& c : arc_candidates(n.position, heading, cfg))
            consider(e.index, c, false);
        // The goal is always offered as a capture candidate; classification
        // rejects it unless the straight connection is actually flyable.
        consider(e.index, goal, true);
    }
    throw NoRouteFound("plan: no route from '" + from_id + "' to '" + to_id + "'", expanded);
}

}  // namespace ovplan
