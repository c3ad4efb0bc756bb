#include "midnav/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "midnav/error.hpp"
#include "midnav/locomotion.hpp"

namespace midnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// First intersection along a ray against full-height occupied columns and the
// per-cell ground surface, via 2D DDA over the grid. Returns the 3D arc-length
// parameter of the hit, or +inf.
double march_ray(const Scene& scene, double ox, double oy, double oz,
                 double dx, double dy, double dz, double max_range) {
    const double cell = scene.cell_size;
    int ix = scene.cell_index_x(ox);
    int iy = scene.cell_index_y(oy);

    const double horizontal = std::hypot(dx, dy);
    if (horizontal < 1e-12) {
        // Straight down (or up): only the ground of the current cell matters.
        if (dz < 0.0 && scene.in_bounds(ix, iy)) {
            const double t = (oz - scene.ground_at(ix, iy)) / -dz;
            if (t >= 0.0 && t <= max_range) return t;
        }
        return kInf;
    }

    const int step_x = dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0);
    const int step_y = dy > 0.0 ? 1 : (dy < 0.0 ? -1 : 0);
    const auto boundary_t = [&](double origin, double dir, int idx, int step) {
        if (step == 0) return kInf;
        const double edge = (step > 0 ? (idx + 1) * cell : idx * cell);
        return (edge - origin) / dir;
    };

    double t_max_x = boundary_t(ox, dx, ix, step_x);
    double t_max_y = boundary_t(oy, dy, iy, step_y);
    const double t_delta_x = step_x != 0 ? cell / std::abs(dx) : kInf;
    const double t_delta_y = step_y != 0 ? cell / std::abs(dy) : kInf;

    double t_enter = 0.0;
    bool first_cell = true;
    while (scene.in_bounds(ix, iy) && t_enter <= max_range) {
        const double t_exit = std::min(t_max_x, t_max_y);

        // Occupied columns are hit at their entry boundary.
        if (!first_cell && scene.is_occupied(ix, iy))
            return t_enter <= max_range ? t_enter : kInf;

        if (dz < 0.0) {
            const double t_ground = (oz - scene.ground_at(ix, iy)) / -dz;
            if (t_ground >= t_enter && t_ground <= t_exit &&
                t_ground <= max_range)
                return t_ground;
        }

        first_cell = false;
        t_enter = t_exit;
        if (t_max_x < t_max_y) {
            ix += step_x;
            t_max_x += t_delta_x;
        } else {
            iy += step_y;
            t_max_y += t_delta_y;
        }
    }
    return kInf;
}

}  // namespace

PointCloud simulate_scan(const Scene& scene, const RobotState& pose,
                         const LidarConfig& cfg, uint64_t seed) {
    if (!scene.contains({pose.x, pose.y}))
        raise(ErrorCode::PoseOutsideScene, "scan pose outside the scene");

    const int rx = scene.cell_index_x(pose.x);
    const int ry = scene.cell_index_y(pose.y);
    const double ground = scene.ground_at(rx, ry);
    const double oz = ground + cfg.mount_height;

    const double v_min = deg_to_rad(cfg.vertical_range_deg[0]);
    const double v_max = deg_to_rad(cfg.vertical_range_deg[1]);
    const double h_min = deg_to_rad(cfg.horizontal_range_deg[0]);
    const double h_span = deg_to_rad(cfg.horizontal_range_deg[1] -
                                     cfg.horizontal_range_deg[0]);
    const double h_step = deg_to_rad(cfg.horizontal_resolution_deg);
    const int n_azimuth = static_cast<int>(std::lround(h_span / h_step));

    std::mt19937 rng(static_cast<uint32_t>(seed));
    std::normal_distribution<double> noise(0.0, cfg.range_noise_sigma);

    PointCloud cloud;
    cloud.stamp = pose.t;
    cloud.points.reserve(static_cast<std::size_t>(cfg.channels) * n_azimuth);

    for (int c = 0; c < cfg.channels; ++c) {
        const double elevation =
            cfg.channels > 1 ? v_min + c * (v_max - v_min) / (cfg.channels - 1)
                             : v_min;
        const double cos_e = std::cos(elevation);
        const double sin_e = std::sin(elevation);
        for (int a = 0; a < n_azimuth; ++a) {
            const double azimuth = h_min + a * h_step;
            const double world_angle = pose.yaw + azimuth;
            const double dx = cos_e * std::cos(world_angle);
            const double dy = cos_e * std::sin(world_angle);
            const double dz = -sin_e;  // elevation measures downward tilt

            double t = march_ray(scene, pose.x, pose.y, oz, dx, dy, dz,
                                 cfg.max_range);
            if (t == kInf) continue;
            if (cfg.range_noise_sigma > 0.0)
                t = std::max(0.0, t + noise(rng));

            // Hit expressed in the robot frame; a tiny forward nudge keeps
            // boundary hits inside the cell they belong to.
            const double tn = t + 1e-9;
            cloud.points.push_back({cos_e * std::cos(azimuth) * tn,
                                    cos_e * std::sin(azimuth) * tn,
                                    cfg.mount_height - sin_e * tn});
        }
    }
    return cloud;
}

HeightMap voxelize_heightmap(const PointCloud& cloud,
                             const HeightMapConfig& cfg) {
    HeightMap map;
    map.config = cfg;
    map.nx = static_cast<int>(
        std::lround((cfg.x_range[1] - cfg.x_range[0]) / cfg.voxel_size));
    map.ny = static_cast<int>(
        std::lround((cfg.y_range[1] - cfg.y_range[0]) / cfg.voxel_size));
    const std::size_t cells = static_cast<std::size_t>(map.nx) * map.ny;
    map.values.assign(cells, cfg.z_clip[0]);
    map.valid.assign(cells, 0);

    std::vector<double> min_z(cells, kInf);
    for (const Point3& p : cloud.points) {
        const int ix = static_cast<int>(
            std::floor((p.x - cfg.x_range[0]) / cfg.voxel_size));
        const int iy = static_cast<int>(
            std::floor((p.y - cfg.y_range[0]) / cfg.voxel_size));
        if (ix < 0 || ix >= map.nx || iy < 0 || iy >= map.ny) continue;
        const std::size_t idx = static_cast<std::size_t>(iy) * map.nx + ix;
        min_z[idx] = std::min(min_z[idx], p.z);
    }

    for (std::size_t i = 0; i < cells; ++i) {
        if (min_z[i] == kInf) continue;
        map.values[i] = std::clamp(min_z[i], cfg.z_clip[0], cfg.z_clip[1]);
        map.valid[i] = 1;
    }
    return map;
}

HeightMap temporal_max(const std::vector<HeightMap>& window) {
    if (window.empty())
        raise(ErrorCode::EmptyInput, "temporal_max needs at least one map");

    const HeightMap& first = window.front();
    for (const HeightMap& m : window) {
        const bool same_grid =
            m.nx == first.nx && m.ny == first.ny &&
            m.config.voxel_size == first.config.voxel_size &&
            m.config.x_range[0] == first.config.x_range[0] &&
            m.config.y_range[0] == first.config.y_range[0];
        if (!same_grid)
            raise(ErrorCode::DimsMismatch, "height maps differ in layout");
    }

    HeightMap out = first;
    const std::size_t cells = out.values.size();
    out.values.assign(cells, first.config.z_clip[0]);
    out.valid.assign(cells, 0);
    for (const HeightMap& m : window) {
        for (std::size_t i = 0; i < cells; ++i) {
            if (!m.valid[i]) continue;
            out.values[i] = out.valid[i] ? std::max(out.values[i], m.values[i])
                                         : m.values[i];
            out.valid[i] = 1;
        }
    }
    return out;
}

}  // namespace midnav
