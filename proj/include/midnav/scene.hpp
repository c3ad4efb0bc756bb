#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "midnav/geometry.hpp"

namespace midnav {

// 2.5D world: row-major grids indexed [iy * width + ix], cell (ix, iy)
// covering [ix*cell, (ix+1)*cell) x [iy*cell, (iy+1)*cell) in meters.
struct Scene {
    std::string scene_id;
    double cell_size = 0.1;  // meters
    int width = 0;           // cells along x
    int height = 0;          // cells along y
    std::vector<uint8_t> occupied;      // 0/1
    std::vector<double> ground_height;  // meters, defaults to 0
    Pose start_pose;
    Vec2 goal;
    std::vector<Vec2> reference_path;
    std::string instruction;

    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && ix < width && iy >= 0 && iy < height;
    }
    bool is_occupied(int ix, int iy) const {
        return occupied[static_cast<std::size_t>(iy) * width + ix] != 0;
    }
    double ground_at(int ix, int iy) const {
        return ground_height[static_cast<std::size_t>(iy) * width + ix];
    }
    Vec2 cell_center(int ix, int iy) const {
        return {(ix + 0.5) * cell_size, (iy + 0.5) * cell_size};
    }
    int cell_index_x(double x) const {
        return static_cast<int>(std::floor(x / cell_size));
    }
    int cell_index_y(double y) const {
        return static_cast<int>(std::floor(y / cell_size));
    }
    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.y >= 0.0 && p.x < width * cell_size &&
               p.y < height * cell_size;
    }
};

// Occupancy inflated by the robot radius; blocked strictly contains occupied.
struct TraversabilityGrid {
    double cell_size = 0.1;
    int width = 0;
    int height = 0;
    std::vector<uint8_t> blocked;

    bool in_bounds(int ix, int iy) const {
        return ix >= 0 && ix < width && iy >= 0 && iy < height;
    }
    bool is_blocked(int ix, int iy) const {
        return blocked[static_cast<std::size_t>(iy) * width + ix] != 0;
    }
    Vec2 cell_center(int ix, int iy) const {
        return {(ix + 0.5) * cell_size, (iy + 0.5) * cell_size};
    }
    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.y >= 0.0 && p.x < width * cell_size &&
               p.y < height * cell_size;
    }
};

inline constexpr double kDefaultRobotRadius = 0.30;  // meters, Go2-scale

struct SceneGenParams {
    double size_m = 12.0;           // square room edge length
    double obstacle_density = 0.1;  // target fraction of interior cells
    double min_clearance = 0.7;     // guaranteed corridor width, meters
    double cell_size = 0.1;
    enum class Ground { Flat, Ramp, Steps } ground = Ground::Flat;
    double ground_scale = 0.0;  // peak height for ramp/steps
};

// Loads and fully validates a scene JSON file (schema in docs/file-formats.md).
// Throws SchemaError or ValidationError.
Scene load_scene(const std::string& path);

// Validates an in-memory scene against the same invariants as load_scene.
void validate_scene(const Scene& scene);

void save_scene(const Scene& scene, const std::string& path);

// Deterministic procedural room: border walls plus random rectangular
// obstacles, start on the left, goal on the right, Dijkstra reference path.
// Throws GenerationFailed when the clearance constraint cannot be met.
Scene generate_scene(uint64_t seed, const SceneGenParams& params = {});

// Adds clutter obstacles on top of `scene`'s reference path while keeping a
// bypass corridor, for obstacle-avoidance experiments. Deterministic in seed.
Scene add_path_clutter(const Scene& scene, uint64_t seed, int count = 2,
                       double min_goal_distance = 4.0,
                       double max_goal_distance = 5.5);

// Cell blocked iff any occupied cell center lies within `radius` of its
// center (closed boundary).
TraversabilityGrid inflate(const Scene& scene, double radius);

// 8-connected Dijkstra between the cells containing a and b. Straight moves
// cost cell_size, diagonals cell_size*sqrt(2); diagonal steps additionally
// require both orthogonal neighbors to be free (no corner cutting).
// nullopt when unreachable. Throws OutOfBounds.
std::optional<double> geodesic_distance(const TraversabilityGrid& grid, Vec2 a,
                                        Vec2 b);

// Distance (meters) from every cell to `source`; unreachable cells hold
// +infinity. Same edge rule as geodesic_distance.
std::vector<double> distance_field(const TraversabilityGrid& grid, Vec2 source);

// Waypoint polyline of cell centers from a's cell to b's cell; consecutive
// waypoints are 8-neighbors. Throws Unreachable or OutOfBounds.
std::vector<Vec2> shortest_path(const TraversabilityGrid& grid, Vec2 a, Vec2 b);

}  // namespace midnav
