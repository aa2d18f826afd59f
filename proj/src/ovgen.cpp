#include "ovplan/ovgen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "ovplan/stats.hpp"

namespace ovplan {

void OvGenConfig::validate() const {
    if (!(inclusion > 0.0 && inclusion < 1.0))
        throw std::invalid_argument("OvGenConfig: inclusion must be in (0, 1)");
    if (!(bloat_init >= 0.0))
        throw std::invalid_argument("OvGenConfig: bloat_init must be >= 0");
    if (!(bloat_step > 0.0))
        throw std::invalid_argument("OvGenConfig: bloat_step must be positive");
    if (bloat_max_iters < 0)
        throw std::invalid_argument("OvGenConfig: bloat_max_iters must be >= 0");
    if (!(cov_floor >= 0.0))
        throw std::invalid_argument("OvGenConfig: cov_floor must be >= 0");
    if (!(region_duration > 0.0))
        throw std::invalid_argument("OvGenConfig: region_duration must be positive");
    if (min_fit_sample < 2)
        throw std::invalid_argument("OvGenConfig: min_fit_sample must be >= 2");
    if (ensemble_runs < 1)
        throw std::invalid_argument("OvGenConfig: ensemble_runs must be >= 1");
}

std::pair<std::vector<AircraftState>, std::vector<AircraftState>> split_sample(
    std::span<const AircraftState> states, const OvGenConfig& cfg, Rng& rng) {
    const std::size_t n = states.size();
    if (n < 2 * static_cast<std::size_t>(cfg.min_fit_sample))
        throw std::invalid_argument("split_sample: needs at least " +
                                    std::to_string(2 * cfg.min_fit_sample) + " states, got " +
                                    std::to_string(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const std::size_t fit_count = (n + 1) / 2;  // ceil(n/2): |holdout| <= |fit|
    std::pair<std::vector<AircraftState>, std::vector<AircraftState>> out;
    out.first.reserve(fit_count);
    out.second.reserve(n - fit_count);
    for (std::size_t i = 0; i < n; ++i) {
        (i < fit_count ? out.first : out.second).push_back(states[order[i]]);
    }
    return out;
}

EllipseRegion fit_ellipse(std::span<const AircraftState> fit, const OvGenConfig& cfg,
                          double bloat) {
    if (fit.size() < static_cast<std::size_t>(cfg.min_fit_sample))
        throw std::invalid_argument("fit_ellipse: fit sample below the floor of " +
                                    std::to_string(cfg.min_fit_sample));
    const double n = static_cast<double>(fit.size());
    EllipseRegion region;

    double mx = 0.0;
    double my = 0.0;
    for (const AircraftState& s : fit) {
        mx += s.position.x;
        my += s.position.y;
    }
    mx /= n;
    my /= n;
    region.mean = {mx, my};

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const AircraftState& s : fit) {
        const double dx = s.position.x - mx;
        const double dy = s.position.y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    region.cov_xx = sxx / (n - 1.0) + cfg.cov_floor;
    region.cov_xy = sxy / (n - 1.0);
    region.cov_yy = syy / (n - 1.0) + cfg.cov_floor;

    const EigenPair eig = eigen_symmetric_2x2(region.cov_xx, region.cov_xy, region.cov_yy);
    if (eig.lambda2 < 1e-9) {
        // Near-collinear cloud (early-flight slices can be almost 1-D).
        region.cov_xx += 1e-6;
        region.cov_yy += 1e-6;
        region.regularized = true;
    }
    region.z = std::abs(normal_ppf((1.0 - cfg.inclusion) / 2.0)) + bloat;
    return region;
}

ValidationResult validate_region(const EllipseRegion& region,
                                 std::span<const AircraftState> fit,
                                 std::span<const AircraftState> holdout,
                                 const OvGenConfig& cfg) {
    if (holdout.empty())
        throw std::invalid_argument("validate_region: empty holdout");
    std::vector<double> fit_distances;
    fit_distances.reserve(fit.size());
    for (const AircraftState& s : fit) fit_distances.push_back(region.mahalanobis(s.position));

    ValidationResult result;
    result.threshold = percentile(std::move(fit_distances), cfg.inclusion);
    std::size_t within = 0;
    for (const AircraftState& s : holdout)
        if (region.mahalanobis(s.position) <= result.threshold) ++within;
    result.fraction = static_cast<double>(within) / static_cast<double>(holdout.size());
    result.passed = result.fraction >= cfg.inclusion;
    return result;
}

EllipseRegion build_region(std::span<const AircraftState> states, const OvGenConfig& cfg,
                           Rng& rng) {
    cfg.validate();
    double bloat = cfg.bloat_init;
    for (int attempt = 0; attempt <= cfg.bloat_max_iters; ++attempt) {
        const auto [fit, holdout] = split_sample(states, cfg, rng);
        const EllipseRegion region = fit_ellipse(fit, cfg, bloat);
        const ValidationResult v = validate_region(region, fit, holdout, cfg);
        if (v.passed) return region;
        bloat += cfg.bloat_step;
    }
    throw std::runtime_error(
        "build_region: validation exhausted after " + std::to_string(cfg.bloat_max_iters) +
        " bloat escalations (multi-modal or pathological spread?)");
}

Contract build_contract(const Route& route, const std::vector<SegmentRecord>& records,
                        const OvGenConfig& cfg, std::uint64_t seed,
                        const std::string& contract_id) {
    cfg.validate();
    route.validate();
    if (records.empty()) throw std::invalid_argument("build_contract: no segment records");

    const double dt = records.front().dt;
    const double t_d =
        dt * static_cast<double>(records.front().slices.size() - 1);
    const double per_region = cfg.region_duration / dt;
    const double per_segment = t_d / cfg.region_duration;
    if (std::abs(per_region - std::round(per_region)) > 1e-9 ||
        std::abs(per_segment - std::round(per_segment)) > 1e-9)
        throw std::invalid_argument(
            "build_contract: region_duration must be a multiple of dt and divide t_d");
    const std::size_t slices_per_region = static_cast<std::size_t>(std::llround(per_region));
    const std::size_t regions_per_segment = static_cast<std::size_t>(std::llround(per_segment));

    struct Task {
        std::size_t segment;
        std::size_t interval;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < records.size(); ++s)
        for (std::size_t k = 0; k < regions_per_segment; ++k) tasks.push_back({s, k});

    std::vector<EllipseRegion> regions(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> cursor{0};

    const auto worker = [&]() {
        for (std::size_t i = cursor.fetch_add(1); i < tasks.size(); i = cursor.fetch_add(1)) {
            const Task& task = tasks[i];
            const SegmentRecord& rec = records[task.segment];
            try {
                // Pool every slice covering the sub-interval, endpoints inclusive.
                std::vector<AircraftState> pooled;
                const std::size_t first = task.interval * slices_per_region;
                const std::size_t last =
                    std::min(rec.slices.size() - 1, first + slices_per_region);
                for (std::size_t s = first; s <= last; ++s)
                    pooled.insert(pooled.end(), rec.slices[s].begin(), rec.slices[s].end());
                Rng rng(mix_seed(seed, task.segment, task.interval));
                EllipseRegion region = build_region(pooled, cfg, rng);
                region.t_start = rec.start_time + static_cast<double>(first) * dt;
                region.t_end = rec.start_time + static_cast<double>(first) * dt +
                               cfg.region_duration;
                regions[i] = region;
            } catch (const std::exception& e) {
                errors[i] = "segment " + std::to_string(task.segment) + ", interval " +
                            std::to_string(task.interval) + ": " + e.what();
            }
        }
    };

    const unsigned n_threads =
        std::max(1u, std::min(std::thread::hardware_concurrency(),
                              static_cast<unsigned>(tasks.size())));
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
    for (std::thread& t : threads) t.join();

    for (const std::string& err : errors)
        if (!err.empty()) throw std::runtime_error("build_contract: " + err);

    Contract contract;
    contract.id = contract_id;
    contract.route = route;
    contract.departure_time = route.departure_time;
    std::size_t i = 0;
    for (std::size_t s = 0; s < records.size(); ++s) {
        OperationalVolume ov;
        ov.start = records[s].start_time;
        ov.end = records[s].start_time + t_d;
        for (std::size_t k = 0; k < regions_per_segment; ++k) ov.regions.push_back(regions[i++]);
        contract.ovs.push_back(std::move(ov));
    }
    contract.validate();
    return contract;
}

}  // namespace ovplan
