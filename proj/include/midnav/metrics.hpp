#pragma once

#include <optional>
#include <string>
#include <vector>

#include "midnav/episode.hpp"
#include "midnav/geometry.hpp"
#include "midnav/scene.hpp"

namespace midnav {

struct MetricReport {
    double ne = 0.0;        // meters; +infinity when the goal is walled off
    bool os = false;
    bool sr = false;
    double spl = 0.0;       // in [0, 1], 0 whenever sr is false
    double ndtw = 0.0;      // in [0, 1]
    double lin_vel_err = 0.0;   // m/s
    double ang_vel_err = 0.0;   // rad/s
    double collision_rate = 0.0;  // percent of control steps with contact
};

struct MetricConfig {
    double success_radius = 3.0;  // meters, also the nDTW distance threshold
    bool euclidean_ne = false;    // straight-line NE for map-free scenes
};

// Geodesic distance from the final position to the goal (+infinity sentinel
// when unreachable). Endpoints snap to the nearest free cell within a few
// cells, since a legal robot position may sit in an inflation-blocked cell.
double navigation_error(const TraversabilityGrid& grid, Vec2 final_pos,
                        Vec2 goal, bool euclidean = false);

struct SuccessFlags {
    bool sr = false;
    bool os = false;
};

// sr: stopped and NE within the radius. os: any trajectory point within the
// radius of the goal (geodesic).
SuccessFlags success(const EpisodeRecord& record, const TraversabilityGrid& grid,
                     Vec2 goal, const MetricConfig& cfg = {});

// S * l / max(p, l): success weighted by geodesic-optimal path length over
// executed length. A zero-length reference (start on goal) returns S.
double spl(const EpisodeRecord& record, const TraversabilityGrid& grid,
           Vec2 start, Vec2 goal, const MetricConfig& cfg = {});

// Minimum-cost monotone alignment between two polylines (dynamic programming,
// Euclidean point distance). Throws EmptyPath.
double dtw(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

// exp(-DTW(executed, reference) / (|reference| * d_th)).
double ndtw(const std::vector<Vec2>& executed, const std::vector<Vec2>& reference,
            double d_th = 3.0);

// Polyline resampled at a fixed arc spacing (endpoints kept). Dense control
// traces go through this before nDTW so point counts stay comparable to the
// waypoint-level reference.
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& points,
                                    double spacing);

struct LowLevelMetrics {
    double lin_vel_err = 0.0;
    double ang_vel_err = 0.0;
    double collision_rate = 0.0;  // percent
};

// Mean absolute commanded-vs-achieved velocity error over non-stop control
// steps, plus percent of steps in contact. Throws EmptyTrace.
LowLevelMetrics lowlevel_metrics(const EpisodeRecord& record);

// All per-episode metrics for one record against its scene.
MetricReport evaluate_episode(const EpisodeRecord& record, const Scene& scene,
                              const MetricConfig& cfg = {},
                              double robot_radius = kDefaultRobotRadius);

struct AggregateReport {
    int count = 0;
    double ne = 0.0;
    double os = 0.0;  // rate in [0, 1]
    double sr = 0.0;
    double spl = 0.0;
    double ndtw = 0.0;
    double lin_vel_err = 0.0;
    double ang_vel_err = 0.0;
    double collision_rate = 0.0;
};

// Field-wise means; booleans averaged as rates. Throws EmptyInput.
AggregateReport aggregate(const std::vector<MetricReport>& reports);

}  // namespace midnav
