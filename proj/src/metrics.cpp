#include "midnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "midnav/error.hpp"

namespace midnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double field_at(const TraversabilityGrid& grid, const std::vector<double>& field,
                Vec2 p) {
    const auto snapped = snap_to_free(grid, p, 3);
    if (!snapped) return kInf;
    const int ix = static_cast<int>(std::floor(snapped->x / grid.cell_size));
    const int iy = static_cast<int>(std::floor(snapped->y / grid.cell_size));
    return field[static_cast<std::size_t>(iy) * grid.width + ix];
}

std::vector<double> goal_field(const TraversabilityGrid& grid, Vec2 goal) {
    const auto snapped = snap_to_free(grid, goal, 3);
    if (!snapped)
        return std::vector<double>(
            static_cast<std::size_t>(grid.width) * grid.height, kInf);
    return distance_field(grid, *snapped);
}

}  // namespace

double navigation_error(const TraversabilityGrid& grid, Vec2 final_pos,
                        Vec2 goal, bool euclidean) {
    if (!grid.contains(final_pos) || !grid.contains(goal))
        raise(ErrorCode::OutOfBounds, "position outside grid");
    if (euclidean) return distance(final_pos, goal);
    const auto field = goal_field(grid, goal);
    return field_at(grid, field, final_pos);
}

SuccessFlags success(const EpisodeRecord& record, const TraversabilityGrid& grid,
                     Vec2 goal, const MetricConfig& cfg) {
    if (record.trajectory.empty())
        raise(ErrorCode::EmptyTrace, "record has no trajectory");

    const auto field = goal_field(grid, goal);
    const auto dist_to_goal = [&](Vec2 p) {
        if (cfg.euclidean_ne) return distance(p, goal);
        return field_at(grid, field, p);
    };

    SuccessFlags flags;
    double best = kInf;
    for (const TrajectorySample& s : record.trajectory)
        best = std::min(best, dist_to_goal({s.x, s.y}));
    flags.os = best <= cfg.success_radius;

    const TrajectorySample& last = record.trajectory.back();
    const double ne = dist_to_goal({last.x, last.y});
    flags.sr = record.stop_issued && ne <= cfg.success_radius;
    return flags;
}

double spl(const EpisodeRecord& record, const TraversabilityGrid& grid,
           Vec2 start, Vec2 goal, const MetricConfig& cfg) {
    const SuccessFlags flags = success(record, grid, goal, cfg);
    const double s = flags.sr ? 1.0 : 0.0;

    const auto field = goal_field(grid, goal);
    const double optimal = field_at(grid, field, start);
    if (optimal == kInf) return 0.0;
    if (optimal == 0.0) return s;  // degenerate: start on goal

    double executed = 0.0;
    for (std::size_t i = 1; i < record.trajectory.size(); ++i) {
        const auto& a = record.trajectory[i - 1];
        const auto& b = record.trajectory[i];
        executed += std::hypot(b.x - a.x, b.y - a.y);
    }
    return s * optimal / std::max(executed, optimal);
}

double dtw(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty())
        raise(ErrorCode::EmptyPath, "DTW inputs must be non-empty");

    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<double> prev(m + 1, kInf);
    std::vector<double> curr(m + 1, kInf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        curr[0] = kInf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double cost = distance(a[i - 1], b[j - 1]);
            curr[j] = cost + std::min({prev[j], curr[j - 1], prev[j - 1]});
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

double ndtw(const std::vector<Vec2>& executed, const std::vector<Vec2>& reference,
            double d_th) {
    const double cost = dtw(executed, reference);
    return std::exp(-cost / (static_cast<double>(reference.size()) * d_th));
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& points,
                                    double spacing) {
    if (points.size() <= 1 || spacing <= 0.0) return points;
    std::vector<Vec2> out{points.front()};
    double carried = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        Vec2 prev = points[i - 1];
        const Vec2 next = points[i];
        double seg = distance(prev, next);
        while (carried + seg >= spacing) {
            const double need = spacing - carried;
            const double f = need / seg;
            prev = {prev.x + f * (next.x - prev.x),
                    prev.y + f * (next.y - prev.y)};
            out.push_back(prev);
            seg -= need;
            carried = 0.0;
        }
        carried += seg;
    }
    if (carried > 1e-12) out.push_back(points.back());
    return out;
}

LowLevelMetrics lowlevel_metrics(const EpisodeRecord& record) {
    LowLevelMetrics out;
    int tracked = 0;
    int total = 0;
    int contacts = 0;
    for (const TrajectorySample& s : record.trajectory) {
        if (s.decision < 0) continue;  // initial sample, no command yet
        ++total;
        if (s.collided) ++contacts;
        if (s.stop_step) continue;
        ++tracked;
        out.lin_vel_err += std::abs(s.v_cmd - s.v);
        out.ang_vel_err += std::abs(s.omega_cmd - s.omega);
    }
    if (total == 0)
        raise(ErrorCode::EmptyTrace, "record has no control steps");
    if (tracked > 0) {
        out.lin_vel_err /= tracked;
        out.ang_vel_err /= tracked;
    }
    out.collision_rate = 100.0 * contacts / total;
    return out;
}

MetricReport evaluate_episode(const EpisodeRecord& record, const Scene& scene,
                              const MetricConfig& cfg, double robot_radius) {
    if (record.trajectory.empty())
        raise(ErrorCode::EmptyTrace, "record has no trajectory");

    const TraversabilityGrid grid = inflate(scene, robot_radius);
    MetricReport report;

    const TrajectorySample& last = record.trajectory.back();
    report.ne = navigation_error(grid, {last.x, last.y}, scene.goal,
                                 cfg.euclidean_ne);
    const SuccessFlags flags = success(record, grid, scene.goal, cfg);
    report.sr = flags.sr;
    report.os = flags.os;
    report.spl = spl(record, grid, {scene.start_pose.x, scene.start_pose.y},
                     scene.goal, cfg);

    std::vector<Vec2> executed;
    executed.reserve(record.trajectory.size());
    for (const TrajectorySample& s : record.trajectory)
        executed.push_back({s.x, s.y});
    executed = resample_polyline(executed, scene.cell_size);
    report.ndtw = ndtw(executed, scene.reference_path, cfg.success_radius);

    const LowLevelMetrics low = lowlevel_metrics(record);
    report.lin_vel_err = low.lin_vel_err;
    report.ang_vel_err = low.ang_vel_err;
    report.collision_rate = low.collision_rate;
    return report;
}

AggregateReport aggregate(const std::vector<MetricReport>& reports) {
    if (reports.empty())
        raise(ErrorCode::EmptyInput, "no reports to aggregate");

    AggregateReport agg;
    agg.count = static_cast<int>(reports.size());
    for (const MetricReport& r : reports) {
        agg.ne += r.ne;
        agg.os += r.os ? 1.0 : 0.0;
        agg.sr += r.sr ? 1.0 : 0.0;
        agg.spl += r.spl;
        agg.ndtw += r.ndtw;
        agg.lin_vel_err += r.lin_vel_err;
        agg.ang_vel_err += r.ang_vel_err;
        agg.collision_rate += r.collision_rate;
    }
    const double n = agg.count;
    agg.ne /= n;
    agg.os /= n;
    agg.sr /= n;
    agg.spl /= n;
    agg.ndtw /= n;
    agg.lin_vel_err /= n;
    agg.ang_vel_err /= n;
    agg.collision_rate /= n;
    return agg;
}

}  // namespace midnav
