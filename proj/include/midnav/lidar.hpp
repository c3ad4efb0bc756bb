#pragma once

#include <cstdint>
#include <vector>

#include "midnav/geometry.hpp"
#include "midnav/scene.hpp"

namespace midnav {

struct RobotState;

// Defaults mirror the simulation sensor table. Vertical angles are measured
// downward from the horizontal plane (0 = horizontal, 90 = straight down),
// spaced inclusively across the range.
struct LidarConfig {
    int channels = 32;
    double vertical_range_deg[2] = {0.0, 90.0};
    double horizontal_range_deg[2] = {-180.0, 180.0};
    double horizontal_resolution_deg = 4.0;
    double max_range = 10.0;       // meters
    double mount_height = 0.4;     // sensor height above local ground, meters
    double range_noise_sigma = 0.0;
};

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Robot-frame point cloud: x forward, y left, z up from the ground plane
// under the robot.
struct PointCloud {
    std::vector<Point3> points;
    double stamp = 0.0;  // seconds
};

struct HeightMapConfig {
    double voxel_size = 0.06;            // meters
    double x_range[2] = {-0.8, 0.2};     // meters, robot frame
    double y_range[2] = {-0.8, 0.8};
    double z_clip[2] = {0.05, 0.5};
    int temporal_window = 5;             // scans
};

// Robot-frame 2.5D grid. values[iy * nx + ix]; cell (ix, iy) covers
// [x_min + ix*voxel, x_min + (ix+1)*voxel) half-open, likewise in y.
// Invalid cells hold z_clip min.
struct HeightMap {
    int nx = 0;
    int ny = 0;
    std::vector<double> values;
    std::vector<uint8_t> valid;
    HeightMapConfig config;

    double at(int ix, int iy) const {
        return values[static_cast<std::size_t>(iy) * nx + ix];
    }
    bool valid_at(int ix, int iy) const {
        return valid[static_cast<std::size_t>(iy) * nx + ix] != 0;
    }
    double cell_x(int ix) const {
        return config.x_range[0] + (ix + 0.5) * config.voxel_size;
    }
    double cell_y(int iy) const {
        return config.y_range[0] + (iy + 0.5) * config.voxel_size;
    }
};

// Casts one ray per (channel, azimuth) pair through the occupancy grid
// (occupied cells are full-height columns) and the ground height field,
// returning first hits in the robot frame. Throws PoseOutsideScene.
PointCloud simulate_scan(const Scene& scene, const RobotState& pose,
                         const LidarConfig& cfg = {}, uint64_t seed = 0);

// Per-2D-cell minimum z of the points that fall in the cell, clipped into
// z_clip; cells without points are invalid and hold z_clip min.
HeightMap voxelize_heightmap(const PointCloud& cloud,
                             const HeightMapConfig& cfg = {});

// Per-cell maximum over the window (newest last): valid where any input is
// valid, value the max over valid inputs. Throws DimsMismatch.
HeightMap temporal_max(const std::vector<HeightMap>& window);

}  // namespace midnav
