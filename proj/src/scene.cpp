#include "midnav/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include <json.hpp>

#include "midnav/error.hpp"

namespace midnav {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

const json& require_field(const json& j, const char* key) {
    if (!j.contains(key))
        raise(ErrorCode::SchemaError, std::string("missing field: ") + key);
    return j.at(key);
}

double require_number(const json& j, const char* key) {
    const json& v = require_field(j, key);
    if (!v.is_number())
        raise(ErrorCode::SchemaError, std::string("field not a number: ") + key);
    return v.get<double>();
}

std::string require_string(const json& j, const char* key) {
    const json& v = require_field(j, key);
    if (!v.is_string())
        raise(ErrorCode::SchemaError, std::string("field not a string: ") + key);
    return v.get<std::string>();
}

Vec2 parse_point(const json& j, const char* key) {
    const json& v = require_field(j, key);
    if (!v.is_object())
        raise(ErrorCode::SchemaError, std::string("field not an object: ") + key);
    return {require_number(v, "x"), require_number(v, "y")};
}

struct CellRect {
    int x0, y0, x1, y1;  // inclusive
};

void fill_rect(Scene& scene, const CellRect& r, uint8_t value) {
    for (int iy = r.y0; iy <= r.y1; ++iy)
        for (int ix = r.x0; ix <= r.x1; ++ix)
            if (scene.in_bounds(ix, iy))
                scene.occupied[static_cast<std::size_t>(iy) * scene.width + ix] =
                    value;
}

int snap_index(const TraversabilityGrid& grid, Vec2 p) {
    if (!grid.contains(p))
        raise(ErrorCode::OutOfBounds,
              "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                  ") outside grid");
    const int ix = std::min(grid.width - 1,
                            static_cast<int>(std::floor(p.x / grid.cell_size)));
    const int iy = std::min(grid.height - 1,
                            static_cast<int>(std::floor(p.y / grid.cell_size)));
    return iy * grid.width + ix;
}

// Dijkstra over the 8-connected free-cell graph. Diagonal moves are allowed
// only when both orthogonal neighbors are free, so paths never cut corners.
std::vector<double> dijkstra_field(const TraversabilityGrid& grid, int source,
                                   int stop_at = -1) {
    const int w = grid.width;
    const int h = grid.height;
    std::vector<double> dist(static_cast<std::size_t>(w) * h, kInf);
    if (grid.blocked[static_cast<std::size_t>(source)]) return dist;

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[static_cast<std::size_t>(source)] = 0.0;
    queue.push({0.0, source});

    const double straight = grid.cell_size;
    const double diagonal = grid.cell_size * std::sqrt(2.0);

    while (!queue.empty()) {
        auto [d, idx] = queue.top();
        queue.pop();
        if (d > dist[static_cast<std::size_t>(idx)]) continue;
        if (idx == stop_at) break;
        const int cx = idx % w;
        const int cy = idx / w;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = cx + dx;
                const int ny = cy + dy;
                if (!grid.in_bounds(nx, ny) || grid.is_blocked(nx, ny)) continue;
                const bool diag = dx != 0 && dy != 0;
                if (diag &&
                    (grid.is_blocked(cx + dx, cy) || grid.is_blocked(cx, cy + dy)))
                    continue;
                const double nd = d + (diag ? diagonal : straight);
                const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                if (nd < dist[n]) {
                    dist[n] = nd;
                    queue.push({nd, static_cast<int>(n)});
                }
            }
        }
    }
    return dist;
}

}  // namespace

void validate_scene(const Scene& scene) {
    if (scene.cell_size <= 0.0)
        raise(ErrorCode::SchemaError, "cell_size must be > 0");
    if (scene.width < 1 || scene.height < 1)
        raise(ErrorCode::SchemaError, "grid must be non-empty");
    const std::size_t cells =
        static_cast<std::size_t>(scene.width) * scene.height;
    if (scene.occupied.size() != cells)
        raise(ErrorCode::SchemaError, "occupied size != width*height");
    if (scene.ground_height.size() != cells)
        raise(ErrorCode::SchemaError, "ground_height size != width*height");

    const Vec2 start{scene.start_pose.x, scene.start_pose.y};
    if (!scene.contains(start))
        raise(ErrorCode::ValidationError, "start outside grid");
    if (!scene.contains(scene.goal))
        raise(ErrorCode::ValidationError, "goal outside grid");

    const TraversabilityGrid grid = inflate(scene, kDefaultRobotRadius);
    const auto blocked_at = [&](Vec2 p) {
        return grid.is_blocked(scene.cell_index_x(p.x), scene.cell_index_y(p.y));
    };
    if (blocked_at(start)) raise(ErrorCode::ValidationError, "start occupied");
    if (blocked_at(scene.goal))
        raise(ErrorCode::ValidationError, "goal occupied");

    if (scene.reference_path.empty())
        raise(ErrorCode::ValidationError, "reference_path empty");
    const auto near_cell = [&](Vec2 a, Vec2 b) {
        return std::abs(scene.cell_index_x(a.x) - scene.cell_index_x(b.x)) <= 1 &&
               std::abs(scene.cell_index_y(a.y) - scene.cell_index_y(b.y)) <= 1;
    };
    if (!near_cell(scene.reference_path.front(), start))
        raise(ErrorCode::ValidationError,
              "reference_path does not start at start_pose");
    if (!near_cell(scene.reference_path.back(), scene.goal))
        raise(ErrorCode::ValidationError, "reference_path does not end at goal");
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot open scene file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        raise(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
    }

    if (static_cast<int>(require_number(j, "schema_version")) != 1)
        raise(ErrorCode::SchemaError, "unsupported schema_version");

    Scene scene;
    scene.scene_id = require_string(j, "scene_id");
    scene.cell_size = require_number(j, "cell_size");
    if (scene.cell_size <= 0.0)
        raise(ErrorCode::SchemaError, "cell_size must be > 0");
    scene.width = static_cast<int>(require_number(j, "width"));
    scene.height = static_cast<int>(require_number(j, "height"));
    if (scene.width < 1 || scene.height < 1)
        raise(ErrorCode::SchemaError, "width/height must be >= 1");

    const json& occ = require_field(j, "occupied");
    if (!occ.is_array())
        raise(ErrorCode::SchemaError, "occupied must be an array");
    const std::size_t cells =
        static_cast<std::size_t>(scene.width) * scene.height;
    if (occ.size() != cells)
        raise(ErrorCode::SchemaError, "occupied size != width*height");
    scene.occupied.reserve(cells);
    for (const auto& v : occ) {
        if (!v.is_number_integer())
            raise(ErrorCode::SchemaError, "occupied entries must be 0/1");
        const int b = v.get<int>();
        if (b != 0 && b != 1)
            raise(ErrorCode::SchemaError, "occupied entries must be 0/1");
        scene.occupied.push_back(static_cast<uint8_t>(b));
    }

    if (j.contains("ground_height")) {
        const json& gh = j.at("ground_height");
        if (!gh.is_array() || gh.size() != cells)
            raise(ErrorCode::SchemaError, "ground_height size != width*height");
        for (const auto& v : gh) {
            if (!v.is_number())
                raise(ErrorCode::SchemaError, "ground_height entries not numbers");
            scene.ground_height.push_back(v.get<double>());
        }
    } else {
        scene.ground_height.assign(cells, 0.0);
    }

    const json& sp = require_field(j, "start_pose");
    scene.start_pose = {require_number(sp, "x"), require_number(sp, "y"),
                        require_number(sp, "yaw")};
    scene.goal = parse_point(j, "goal");

    const json& rp = require_field(j, "reference_path");
    if (!rp.is_array())
        raise(ErrorCode::SchemaError, "reference_path must be an array");
    for (const auto& v : rp)
        scene.reference_path.push_back(
            {require_number(v, "x"), require_number(v, "y")});
    scene.instruction = require_string(j, "instruction");

    validate_scene(scene);
    return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
    json j;
    j["schema_version"] = 1;
    j["scene_id"] = scene.scene_id;
    j["cell_size"] = scene.cell_size;
    j["width"] = scene.width;
    j["height"] = scene.height;
    j["occupied"] = json::array();
    for (uint8_t b : scene.occupied) j["occupied"].push_back(int(b));
    j["ground_height"] = scene.ground_height;
    j["start_pose"] = {{"x", scene.start_pose.x},
                       {"y", scene.start_pose.y},
                       {"yaw", scene.start_pose.yaw}};
    j["goal"] = {{"x", scene.goal.x}, {"y", scene.goal.y}};
    j["reference_path"] = json::array();
    for (const Vec2& p : scene.reference_path)
        j["reference_path"].push_back({{"x", p.x}, {"y", p.y}});
    j["instruction"] = scene.instruction;

    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write scene file: " + path);
    out << j.dump(2) << "\n";
}

TraversabilityGrid inflate(const Scene& scene, double radius) {
    if (radius < 0.0) raise(ErrorCode::ValidationError, "radius must be >= 0");
    TraversabilityGrid grid;
    grid.cell_size = scene.cell_size;
    grid.width = scene.width;
    grid.height = scene.height;
    grid.blocked.assign(scene.occupied.size(), 0);

    const int reach = static_cast<int>(std::floor(radius / scene.cell_size)) + 1;
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx)
            if (std::hypot(dx, dy) * scene.cell_size <= radius)
                offsets.emplace_back(dx, dy);

    for (int iy = 0; iy < scene.height; ++iy) {
        for (int ix = 0; ix < scene.width; ++ix) {
            if (!scene.is_occupied(ix, iy)) continue;
            for (auto [dx, dy] : offsets) {
                const int nx = ix + dx;
                const int ny = iy + dy;
                if (grid.in_bounds(nx, ny))
                    grid.blocked[static_cast<std::size_t>(ny) * grid.width + nx] =
                        1;
            }
        }
    }
    return grid;
}

std::optional<double> geodesic_distance(const TraversabilityGrid& grid, Vec2 a,
                                        Vec2 b) {
    const int source = snap_index(grid, a);
    const int target = snap_index(grid, b);
    const auto dist = dijkstra_field(grid, source, target);
    const double d = dist[static_cast<std::size_t>(target)];
    if (d == kInf) return std::nullopt;
    return d;
}

std::vector<double> distance_field(const TraversabilityGrid& grid,
                                   Vec2 source) {
    return dijkstra_field(grid, snap_index(grid, source));
}

std::vector<Vec2> shortest_path(const TraversabilityGrid& grid, Vec2 a,
                                Vec2 b) {
    const int source = snap_index(grid, a);
    const int target = snap_index(grid, b);
    const auto dist = dijkstra_field(grid, source);
    if (dist[static_cast<std::size_t>(target)] == kInf)
        raise(ErrorCode::Unreachable, "no path between the given points");

    // Walk downhill in the distance field from target back to source.
    std::vector<Vec2> reversed;
    int idx = target;
    const int w = grid.width;
    const double eps = 1e-9;
    while (true) {
        reversed.push_back(grid.cell_center(idx % w, idx / w));
        if (idx == source) break;
        const int cx = idx % w;
        const int cy = idx / w;
        int best = -1;
        double best_d = dist[static_cast<std::size_t>(idx)];
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = cx + dx;
                const int ny = cy + dy;
                if (!grid.in_bounds(nx, ny) || grid.is_blocked(nx, ny)) continue;
                const bool diag = dx != 0 && dy != 0;
                if (diag &&
                    (grid.is_blocked(cx + dx, cy) || grid.is_blocked(cx, cy + dy)))
                    continue;
                const double step =
                    diag ? grid.cell_size * std::sqrt(2.0) : grid.cell_size;
                const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                if (dist[n] + step <= dist[static_cast<std::size_t>(idx)] + eps &&
                    dist[n] < best_d) {
                    best_d = dist[n];
                    best = static_cast<int>(n);
                }
            }
        }
        idx = best;
    }
    std::reverse(reversed.begin(), reversed.end());
    return reversed;
}

Scene generate_scene(uint64_t seed, const SceneGenParams& params) {
    if (params.size_m < 3.0 || params.cell_size <= 0.0 ||
        params.obstacle_density < 0.0 || params.obstacle_density > 0.4)
        raise(ErrorCode::ValidationError, "scene generation params out of range");

    std::mt19937_64 rng(seed);
    Scene scene;
    scene.cell_size = params.cell_size;
    scene.width = static_cast<int>(std::lround(params.size_m / params.cell_size));
    scene.height = scene.width;
    const std::size_t cells =
        static_cast<std::size_t>(scene.width) * scene.height;
    scene.occupied.assign(cells, 0);
    scene.ground_height.assign(cells, 0.0);
    {
        std::ostringstream id;
        id << "gen-" << seed << "-d" << params.obstacle_density;
        scene.scene_id = id.str();
    }

    // Border walls make the room closed.
    fill_rect(scene, {0, 0, scene.width - 1, 0}, 1);
    fill_rect(scene, {0, scene.height - 1, scene.width - 1, scene.height - 1}, 1);
    fill_rect(scene, {0, 0, 0, scene.height - 1}, 1);
    fill_rect(scene, {scene.width - 1, 0, scene.width - 1, scene.height - 1}, 1);

    if (params.ground != SceneGenParams::Ground::Flat) {
        for (int iy = 0; iy < scene.height; ++iy) {
            for (int ix = 0; ix < scene.width; ++ix) {
                const double frac = double(ix) / double(scene.width - 1);
                double h = params.ground_scale * frac;
                if (params.ground == SceneGenParams::Ground::Steps)
                    h = std::floor(h / 0.1) * 0.1;
                scene.ground_height[static_cast<std::size_t>(iy) * scene.width +
                                    ix] = h;
            }
        }
    }

    const double feasibility_radius =
        std::max(kDefaultRobotRadius, params.min_clearance / 2.0);
    const double size = params.size_m;
    std::uniform_real_distribution<double> lateral(0.25 * size, 0.75 * size);

    const auto snap_center = [&](Vec2 p) {
        return scene.cell_center(scene.cell_index_x(p.x), scene.cell_index_y(p.y));
    };
    Vec2 start = snap_center({1.0, lateral(rng)});
    Vec2 goal = snap_center({size - 1.0, lateral(rng)});

    {
        const TraversabilityGrid empty_grid = inflate(scene, feasibility_radius);
        const auto blocked_at = [&](Vec2 p) {
            return empty_grid.is_blocked(scene.cell_index_x(p.x),
                                         scene.cell_index_y(p.y));
        };
        if (blocked_at(start) || blocked_at(goal))
            raise(ErrorCode::GenerationFailed,
                  "room too small for the requested clearance");
    }

    // Random rectangular obstacles, each kept only if start and goal remain
    // connected on the clearance-inflated grid.
    const std::size_t interior =
        static_cast<std::size_t>(scene.width - 2) * (scene.height - 2);
    const std::size_t target_cells =
        static_cast<std::size_t>(params.obstacle_density * interior);
    std::uniform_int_distribution<int> extent(2, 8);
    std::uniform_int_distribution<int> pos_x(1, scene.width - 2);
    std::uniform_int_distribution<int> pos_y(1, scene.height - 2);
    const double protect =
        feasibility_radius + 2.0 * scene.cell_size + kDefaultRobotRadius;

    std::size_t placed = 0;
    int attempts = 0;
    const int max_attempts = 4000;
    while (placed < target_cells && attempts < max_attempts) {
        ++attempts;
        const int w = extent(rng);
        const int h = extent(rng);
        const int x0 = pos_x(rng);
        const int y0 = pos_y(rng);
        const CellRect rect{x0, y0, std::min(x0 + w - 1, scene.width - 2),
                            std::min(y0 + h - 1, scene.height - 2)};

        const auto corner_ok = [&](Vec2 p) {
            const double cx =
                std::clamp(p.x, rect.x0 * scene.cell_size,
                           (rect.x1 + 1) * scene.cell_size);
            const double cy =
                std::clamp(p.y, rect.y0 * scene.cell_size,
                           (rect.y1 + 1) * scene.cell_size);
            return distance({cx, cy}, p) > protect;
        };
        if (!corner_ok(start) || !corner_ok(goal)) continue;

        std::vector<uint8_t> backup = scene.occupied;
        fill_rect(scene, rect, 1);
        const TraversabilityGrid grid = inflate(scene, feasibility_radius);
        const bool connected = geodesic_distance(grid, start, goal).has_value();
        if (!connected) {
            scene.occupied = std::move(backup);
            continue;
        }
        std::size_t count = 0;
        for (int iy = rect.y0; iy <= rect.y1; ++iy)
            for (int ix = rect.x0; ix <= rect.x1; ++ix)
                if (backup[static_cast<std::size_t>(iy) * scene.width + ix] == 0)
                    ++count;
        placed += count;
    }

    scene.start_pose = {start.x, start.y, 0.0};
    scene.goal = goal;
    const TraversabilityGrid nav = inflate(scene, feasibility_radius);
    scene.reference_path = shortest_path(nav, start, goal);

    // Face along the path.
    for (const Vec2& p : scene.reference_path) {
        if (distance(p, start) >= 0.3) {
            scene.start_pose.yaw = std::atan2(p.y - start.y, p.x - start.x);
            break;
        }
    }

    const bool goal_right = goal.x >= start.x;
    scene.instruction =
        std::string("walk across the room toward the ") +
        (goal_right ? "far" : "near") +
        " side, keep going until you reach the goal marker, then stop";

    validate_scene(scene);
    return scene;
}

Scene add_path_clutter(const Scene& scene, uint64_t seed, int count,
                       double min_goal_distance, double max_goal_distance) {
    Scene out = scene;
    out.scene_id += "-clutter";
    std::mt19937_64 rng(seed);

    const TraversabilityGrid grid = inflate(scene, kDefaultRobotRadius);
    const auto goal_dist = distance_field(grid, scene.goal);
    const auto dist_to_goal = [&](Vec2 p) {
        const int ix = scene.cell_index_x(p.x);
        const int iy = scene.cell_index_y(p.y);
        return goal_dist[static_cast<std::size_t>(iy) * scene.width + ix];
    };

    // Candidate anchors: reference-path points inside the requested
    // distance-to-goal window and away from the start.
    std::vector<Vec2> candidates;
    double along = 0.0;
    for (std::size_t i = 0; i < scene.reference_path.size(); ++i) {
        if (i > 0)
            along +=
                distance(scene.reference_path[i], scene.reference_path[i - 1]);
        const double d = dist_to_goal(scene.reference_path[i]);
        if (along >= 1.5 && d >= min_goal_distance && d <= max_goal_distance)
            candidates.push_back(scene.reference_path[i]);
    }
    if (candidates.empty()) return out;

    int placed = 0;
    for (int attempt = 0; attempt < 16 && placed < count; ++attempt) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        const Vec2 anchor = candidates[pick(rng)];
        const int cx = out.cell_index_x(anchor.x);
        const int cy = out.cell_index_y(anchor.y);
        CellRect rect{cx - 1, cy - 1, cx + 1, cy + 1};

        std::vector<uint8_t> backup = out.occupied;
        fill_rect(out, rect, 1);
        const TraversabilityGrid bypass = inflate(out, kDefaultRobotRadius);
        Vec2 start{out.start_pose.x, out.start_pose.y};
        const bool ok =
            !bypass.is_blocked(out.cell_index_x(start.x),
                               out.cell_index_y(start.y)) &&
            !bypass.is_blocked(out.cell_index_x(out.goal.x),
                               out.cell_index_y(out.goal.y)) &&
            geodesic_distance(bypass, start, out.goal).has_value();
        if (!ok) {
            out.occupied = std::move(backup);
            continue;
        }
        ++placed;
    }
    return out;
}

}  // namespace midnav
