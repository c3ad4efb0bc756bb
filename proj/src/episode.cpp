#include "midnav/episode.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "midnav/datagen.hpp"
#include "midnav/error.hpp"

namespace midnav {

namespace {

std::string frame_ref(const std::string& frames_dir,
                      const std::string& scene_id, uint64_t seed, int index) {
    std::ostringstream ref;
    if (!frames_dir.empty()) ref << frames_dir << "/";
    ref << scene_id << "-s" << seed << "-f";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", index);
    ref << buf << ".pgm";
    return ref.str();
}

double path_length(const std::vector<Vec2>& path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i)
        total += distance(path[i], path[i - 1]);
    return total;
}

}  // namespace

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Stop: return "stop";
        case Termination::MaxDecisions: return "max_decisions";
        case Termination::CollisionTerminate: return "collision_terminate";
        case Termination::AgentError: return "agent_error";
    }
    return "?";
}

std::optional<Vec2> snap_to_free(const TraversabilityGrid& grid, Vec2 p,
                                 int max_cells) {
    if (!grid.contains(p)) return std::nullopt;
    const int cx = static_cast<int>(std::floor(p.x / grid.cell_size));
    const int cy = static_cast<int>(std::floor(p.y / grid.cell_size));
    for (int ring = 0; ring <= max_cells; ++ring) {
        int best_ix = -1, best_iy = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int dy = -ring; dy <= ring; ++dy) {
            for (int dx = -ring; dx <= ring; ++dx) {
                if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
                const int ix = cx + dx;
                const int iy = cy + dy;
                if (!grid.in_bounds(ix, iy) || grid.is_blocked(ix, iy)) continue;
                const double d = distance(grid.cell_center(ix, iy), p);
                if (d < best_d) {
                    best_d = d;
                    best_ix = ix;
                    best_iy = iy;
                }
            }
        }
        if (best_ix >= 0) return grid.cell_center(best_ix, best_iy);
    }
    return std::nullopt;
}

Action oracle_next_action(const TraversabilityGrid& grid, const RobotState& pose,
                          Vec2 goal, const OracleParams& params) {
    const auto start = snap_to_free(grid, {pose.x, pose.y}, 3);
    if (!start)
        raise(ErrorCode::Unreachable, "pose has no free cell nearby");

    const auto path = shortest_path(grid, *start, goal);
    const double remaining = path_length(path);
    if (remaining <= params.stop_radius) return {ActionKind::Stop, 0.0};

    Vec2 target = path.back();
    for (const Vec2& wp : path) {
        if (distance(wp, {pose.x, pose.y}) >= params.fwd_step) {
            target = wp;
            break;
        }
    }

    const double desired = std::atan2(target.y - pose.y, target.x - pose.x);
    const double error = wrap_angle(desired - pose.yaw);
    const double half_step = deg_to_rad(params.turn_step_deg) / 2.0;
    if (std::abs(error) > half_step) {
        // wrap_angle maps pi to +pi, so an exact about-face turns left.
        const ActionKind kind =
            error > 0.0 ? ActionKind::TurnLeft : ActionKind::TurnRight;
        return {kind, params.turn_step_deg};
    }
    return {ActionKind::Forward, params.fwd_step};
}

std::vector<Action> traj_to_actions(const std::vector<Pose>& poses,
                                    double fwd_quantum,
                                    double turn_quantum_deg) {
    if (poses.size() < 2)
        raise(ErrorCode::DegenerateTrajectory,
              "need at least two poses, got " + std::to_string(poses.size()));

    const double turn_quantum = deg_to_rad(turn_quantum_deg);
    std::vector<Action> actions;
    for (std::size_t i = 1; i < poses.size(); ++i) {
        const Pose& a = poses[i - 1];
        const Pose& b = poses[i];

        const double dyaw = wrap_angle(b.yaw - a.yaw);
        if (std::abs(dyaw) >= turn_quantum / 2.0) {
            const double quanta = std::round(std::abs(dyaw) / turn_quantum);
            const double magnitude =
                std::min(180.0, quanta * turn_quantum_deg);
            actions.push_back({dyaw > 0.0 ? ActionKind::TurnLeft
                                          : ActionKind::TurnRight,
                               magnitude});
        }

        double dist = std::hypot(b.x - a.x, b.y - a.y);
        if (dist >= fwd_quantum / 2.0) {
            double magnitude = std::round(dist / fwd_quantum) * fwd_quantum;
            while (magnitude > 5.0) {
                actions.push_back({ActionKind::Forward, 5.0});
                magnitude -= 5.0;
            }
            if (magnitude >= fwd_quantum / 2.0)
                actions.push_back({ActionKind::Forward, magnitude});
        }
    }
    actions.push_back({ActionKind::Stop, 0.0});
    return actions;
}

OracleAgent::OracleAgent(const Scene& scene, const OracleParams& params,
                         double robot_radius, double planning_margin)
    : grid_(inflate(scene, robot_radius + planning_margin)),
      goal_(scene.goal),
      params_(params) {}

std::string OracleAgent::decide(const ObservationBundle& obs) {
    const RobotState pose{obs.pose.x, obs.pose.y, obs.pose.yaw, 0, 0, 0};
    return format_action(oracle_next_action(grid_, pose, goal_, params_));
}

void render_frame(const Scene& scene, const Pose& pose,
                  const std::string& path) {
    // 64x64 top-down crop, 0.1 m/px, robot centered; walls dark, goal bright.
    constexpr int kSize = 64;
    constexpr double kScale = 0.1;
    std::vector<uint8_t> pixels(kSize * kSize, 0);
    for (int py = 0; py < kSize; ++py) {
        for (int px = 0; px < kSize; ++px) {
            const double wx = pose.x + (px - kSize / 2) * kScale;
            const double wy = pose.y + (kSize / 2 - py) * kScale;
            uint8_t shade = 60;  // outside
            if (scene.contains({wx, wy})) {
                const int ix = scene.cell_index_x(wx);
                const int iy = scene.cell_index_y(wy);
                shade = scene.is_occupied(ix, iy) ? 20 : 200;
                if (distance({wx, wy}, scene.goal) < 0.3) shade = 255;
            }
            pixels[static_cast<std::size_t>(py) * kSize + px] = shade;
        }
    }

    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write frame: " + path);
    out << "P5\n" << kSize << " " << kSize << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
}

EpisodeRecord run_episode(const Scene& scene, AgentInterface& agent,
                          const EpisodeConfig& cfg, uint64_t seed) {
    if (cfg.frames_budget < 8 || cfg.frames_budget > 64)
        raise(ErrorCode::ValidationError, "frames_budget must be in [8, 64]");
    if (cfg.max_decisions < 1)
        raise(ErrorCode::ValidationError, "max_decisions must be >= 1");
    validate_scene(scene);

    EpisodeRecord record;
    record.scene_id = scene.scene_id;
    record.instruction = scene.instruction;
    record.seed = seed;

    std::mt19937 rng(static_cast<uint32_t>(seed ^ 0x9e3779b9u));
    RobotState state{scene.start_pose.x, scene.start_pose.y,
                     scene.start_pose.yaw, 0.0, 0.0, 0.0};
    record.trajectory.push_back({state.t, state.x, state.y, state.yaw, 0.0, 0.0,
                                 0.0, 0.0, false, -1, false});

    std::deque<HeightMap> scan_window;
    HeightMap fused;
    bool have_map = false;
    double next_scan_t = 0.0;
    double avoid_yaw_debt = 0.0;  // net rotation injected by the avoidance layer
    const double scan_interval = 1.0 / cfg.scan_rate_hz;

    const auto maybe_scan = [&]() {
        if (!cfg.avoidance_enabled || state.t < next_scan_t) return;
        next_scan_t = state.t + scan_interval;
        const PointCloud cloud = simulate_scan(scene, state, cfg.avoid_lidar);
        scan_window.push_back(voxelize_heightmap(cloud, cfg.avoid_heightmap));
        while (static_cast<int>(scan_window.size()) >
               cfg.avoid_heightmap.temporal_window)
            scan_window.pop_front();
        fused = temporal_max({scan_window.begin(), scan_window.end()});
        have_map = true;
    };

    bool terminated = false;
    for (int d = 0; d < cfg.max_decisions && !terminated; ++d) {
        record.frame_refs.push_back(
            frame_ref(cfg.frames_dir, scene.scene_id, seed, d));
        if (!cfg.frames_dir.empty())
            render_frame(scene, {state.x, state.y, state.yaw},
                         record.frame_refs.back());

        ObservationBundle obs;
        obs.scene_id = scene.scene_id;
        obs.instruction = scene.instruction;
        obs.decision_index = d;
        obs.pose = {state.x, state.y, state.yaw};
        const auto indices = sample_frames(d, cfg.frames_budget);
        for (std::size_t k = 0; k + 1 < indices.size(); ++k)
            obs.history_refs.push_back(record.frame_refs[indices[k]]);
        obs.current_ref = record.frame_refs[d];

        DecisionRecord decision;
        decision.start_pose = {state.x, state.y, state.yaw};
        try {
            decision.raw_text = agent.decide(obs);
            decision.action = parse_action(decision.raw_text).action;
        } catch (const std::exception& e) {
            record.agent_error = e.what();
            record.termination = Termination::AgentError;
            decision.end_pose = decision.start_pose;
            record.decisions.push_back(std::move(decision));
            terminated = true;
            break;
        }
        decision.command = interpret_action(decision.action, cfg.profile);

        const bool is_stop = decision.action.kind == ActionKind::Stop;
        const bool is_turn = decision.action.kind == ActionKind::TurnLeft ||
                             decision.action.kind == ActionKind::TurnRight;
        const double target = is_stop ? 0.0
                              : is_turn
                                  ? deg_to_rad(decision.action.magnitude)
                                  : decision.action.magnitude;

        double progress = 0.0;
        double elapsed = 0.0;
        const double deadline = decision.command.duration + cfg.settle_slack;
        while (true) {
            if (is_stop) {
                if (elapsed >= decision.command.duration - 1e-12) break;
            } else if (progress >= target - 1e-9 || elapsed >= deadline) {
                break;
            }

            maybe_scan();
            VelocityCommand step_cmd = decision.command;
            if (cfg.avoidance_enabled && have_map && decision.command.v != 0.0) {
                step_cmd = avoid_adjust(decision.command, fused, cfg.avoid);
                if (step_cmd == decision.command &&
                    std::abs(avoid_yaw_debt) > 0.02) {
                    // corridor clear again: arc back onto the commanded heading
                    const double rate = std::min(
                        cfg.avoid.omega_turn, std::abs(avoid_yaw_debt) / cfg.dt);
                    step_cmd.omega -= rate * (avoid_yaw_debt > 0 ? 1.0 : -1.0);
                }
            }

            // Shrink the final step so the covered magnitude lands on target.
            double dt_step = std::min(cfg.dt, is_stop
                                                  ? decision.command.duration -
                                                        elapsed
                                                  : cfg.dt);
            RobotState candidate =
                step_dynamics(state, step_cmd, dt_step, cfg.dynamics, &rng);
            if (!is_stop) {
                for (int refine = 0; refine < 2; ++refine) {
                    const double inc =
                        is_turn ? std::abs(wrap_angle(candidate.yaw - state.yaw))
                                : std::hypot(candidate.x - state.x,
                                             candidate.y - state.y);
                    if (progress + inc <= target + 1e-12 || inc <= 1e-12) break;
                    dt_step = std::max(1e-6, dt_step * (target - progress) / inc);
                    candidate =
                        step_dynamics(state, step_cmd, dt_step, cfg.dynamics,
                                      nullptr);
                }
            }

            bool collided_step = false;
            if (check_collision(scene, candidate, cfg.robot_radius)) {
                collided_step = true;
                decision.collided = true;
                candidate.x = state.x;
                candidate.y = state.y;
                candidate.v = 0.0;
            }

            const double inc =
                is_turn ? std::abs(wrap_angle(candidate.yaw - state.yaw))
                        : std::hypot(candidate.x - state.x,
                                     candidate.y - state.y);
            progress += inc;
            elapsed += dt_step;
            if (!is_stop)
                avoid_yaw_debt +=
                    (step_cmd.omega - decision.command.omega) * dt_step;
            state = candidate;
            record.trajectory.push_back({state.t, state.x, state.y, state.yaw,
                                         state.v, state.omega, step_cmd.v,
                                         step_cmd.omega, collided_step, d,
                                         is_stop});

            if (collided_step &&
                cfg.collision_policy == EpisodeConfig::CollisionPolicy::Terminate) {
                record.termination = Termination::CollisionTerminate;
                terminated = true;
                break;
            }
        }

        decision.end_pose = {state.x, state.y, state.yaw};
        record.decisions.push_back(decision);

        if (terminated) break;
        if (is_stop) {
            record.stop_issued = true;
            record.termination = Termination::Stop;
            terminated = true;
        }
    }

    if (!terminated) record.termination = Termination::MaxDecisions;
    record.wall_time = state.t;
    return record;
}

LowLevelEvalReport run_lowlevel_eval(const Scene& scene,
                                     const LowLevelEvalConfig& cfg) {
    validate_scene(scene);

    // One shared schedule so both variants chase identical commands.
    std::mt19937 schedule_rng(static_cast<uint32_t>(cfg.seed));
    std::uniform_real_distribution<double> seg_len(1.0, 3.0);
    std::uniform_real_distribution<double> v_pick(0.0, 0.5);
    std::uniform_real_distribution<double> w_pick(-kPi / 6, kPi / 6);
    std::vector<VelocityCommand> schedule;
    double scheduled = 0.0;
    while (scheduled < cfg.duration) {
        const double length = seg_len(schedule_rng);
        schedule.push_back({v_pick(schedule_rng), w_pick(schedule_rng), length});
        scheduled += length;
    }

    const auto run_variant = [&](bool avoidance) {
        RobotState state{scene.start_pose.x, scene.start_pose.y,
                         scene.start_pose.yaw, 0.0, 0.0, 0.0};
        std::mt19937 rng(static_cast<uint32_t>(cfg.seed ^ 0x51ed2701u));

        std::vector<HeightMap> window;
        HeightMap fused;
        bool have_map = false;
        double next_scan_t = 0.0;

        TrackingMetrics metrics;
        long steps = 0;
        long contacts = 0;
        for (const VelocityCommand& cmd : schedule) {
            double elapsed = 0.0;
            while (elapsed < cmd.duration - 1e-12 && state.t < cfg.duration) {
                if (avoidance && state.t >= next_scan_t) {
                    next_scan_t = state.t + 1.0 / cfg.scan_rate_hz;
                    window.push_back(voxelize_heightmap(
                        simulate_scan(scene, state, cfg.avoid_lidar),
                        cfg.avoid_heightmap));
                    if (static_cast<int>(window.size()) >
                        cfg.avoid_heightmap.temporal_window)
                        window.erase(window.begin());
                    fused = temporal_max(window);
                    have_map = true;
                }
                VelocityCommand step_cmd = cmd;
                if (avoidance && have_map && cmd.v != 0.0)
                    step_cmd = avoid_adjust(cmd, fused, cfg.avoid);

                RobotState next =
                    step_dynamics(state, step_cmd, cfg.dt, cfg.dynamics, &rng);
                bool contact = false;
                if (check_collision(scene, next, cfg.robot_radius)) {
                    contact = true;
                    next.x = state.x;
                    next.y = state.y;
                    next.v = 0.0;
                }
                state = next;
                elapsed += cfg.dt;
                ++steps;
                contacts += contact ? 1 : 0;
                metrics.lin_vel_err += std::abs(step_cmd.v - state.v);
                metrics.ang_vel_err += std::abs(step_cmd.omega - state.omega);
            }
            if (state.t >= cfg.duration) break;
        }
        if (steps > 0) {
            metrics.lin_vel_err /= static_cast<double>(steps);
            metrics.ang_vel_err /= static_cast<double>(steps);
            metrics.collision_rate =
                100.0 * static_cast<double>(contacts) / static_cast<double>(steps);
        }
        return metrics;
    };

    LowLevelEvalReport report;
    report.avoidance_off = run_variant(false);
    report.avoidance_on = run_variant(true);
    return report;
}

}  // namespace midnav
