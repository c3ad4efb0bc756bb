#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "midnav/action.hpp"
#include "midnav/geometry.hpp"
#include "midnav/lidar.hpp"
#include "midnav/locomotion.hpp"
#include "midnav/scene.hpp"

namespace midnav {

struct EpisodeConfig {
    int max_decisions = 50;
    double success_radius = 3.0;  // meters
    double dt = 0.02;             // control step, seconds
    int frames_budget = 8;        // total frames per observation, in [8, 64]
    bool avoidance_enabled = false;
    enum class CollisionPolicy { Block, Terminate };
    CollisionPolicy collision_policy = CollisionPolicy::Block;

    double robot_radius = kDefaultRobotRadius;
    CommandProfile profile;
    DynamicsParams dynamics;

    // Commands run until their action magnitude is covered (or, for stop, the
    // hold elapses); settle_slack bounds the extra time beyond the nominal
    // duration, so a blocked robot eventually gives up on the command.
    double settle_slack = 4.0;  // seconds

    // Obstacle-band sensor for the reactive avoidance proxy: a near-horizontal
    // scan fan and a forward height-map window, so obstacle columns read high
    // while the ground stays out of view. The table-default LidarConfig /
    // HeightMapConfig are unchanged; these are the episode engine's own knobs.
    AvoidParams avoid;
    LidarConfig avoid_lidar{.channels = 8,
                            .vertical_range_deg = {0.0, 10.0},
                            .horizontal_range_deg = {-180.0, 180.0},
                            .horizontal_resolution_deg = 4.0,
                            .max_range = 10.0,
                            .mount_height = 0.4};
    HeightMapConfig avoid_heightmap{.voxel_size = 0.06,
                                    .x_range = {0.0, 1.0},
                                    .y_range = {-0.8, 0.8},
                                    .z_clip = {0.05, 0.5},
                                    .temporal_window = 5};
    double scan_rate_hz = 15.0;

    std::string frames_dir;  // when non-empty, top-down frames are rendered
};

struct ObservationBundle {
    std::string scene_id;
    std::string instruction;
    std::vector<std::string> history_refs;  // sampled, oldest first
    std::string current_ref;
    Pose pose;  // metadata for privileged/mock agents
    int decision_index = 0;
};

class AgentInterface {
  public:
    virtual ~AgentInterface() = default;
    virtual std::string decide(const ObservationBundle& obs) = 0;
    virtual std::string name() const { return "agent"; }
};

struct DecisionRecord {
    std::string raw_text;
    Action action;
    VelocityCommand command;
    Pose start_pose;
    Pose end_pose;
    bool collided = false;
};

struct TrajectorySample {
    double t = 0.0;
    double x = 0.0, y = 0.0, yaw = 0.0;
    double v = 0.0, omega = 0.0;        // achieved
    double v_cmd = 0.0, omega_cmd = 0.0;
    bool collided = false;
    int decision = -1;
    bool stop_step = false;  // step executed under a stop command
};

enum class Termination { Stop, MaxDecisions, CollisionTerminate, AgentError };

const char* to_string(Termination t);

struct EpisodeRecord {
    std::string scene_id;
    std::string instruction;
    std::vector<DecisionRecord> decisions;
    std::vector<TrajectorySample> trajectory;
    std::vector<std::string> frame_refs;  // one per decision index
    bool stop_issued = false;
    Termination termination = Termination::MaxDecisions;
    double wall_time = 0.0;  // simulated seconds, deterministic
    uint64_t seed = 0;
    std::string agent_error;
};

struct OracleParams {
    double fwd_step = 0.25;             // meters
    double turn_step_deg = 15.0;
    double stop_radius = 0.5;           // meters, geodesic
};

// Next shortest-path-follower action: Stop inside stop_radius, otherwise turn
// toward the first waypoint at least fwd_step away (ties at pi break left),
// else a fixed forward step. Throws Unreachable.
Action oracle_next_action(const TraversabilityGrid& grid, const RobotState& pose,
                          Vec2 goal, const OracleParams& params = {});

// Greedy pose-trajectory discretization into turn/forward quanta, Stop
// appended. Throws DegenerateTrajectory for fewer than two poses.
std::vector<Action> traj_to_actions(const std::vector<Pose>& poses,
                                    double fwd_quantum = 0.25,
                                    double turn_quantum_deg = 15.0);

// Nearest unblocked cell center within max_cells of p's cell, if any.
std::optional<Vec2> snap_to_free(const TraversabilityGrid& grid, Vec2 p,
                                 int max_cells = 3);

class OracleAgent : public AgentInterface {
  public:
    // Plans on a grid inflated by robot_radius + planning_margin: the margin
    // covers the gap between the waypoint polyline and the swept circle
    // (segment sag plus turn-quantization drift).
    OracleAgent(const Scene& scene, const OracleParams& params = {},
                double robot_radius = kDefaultRobotRadius,
                double planning_margin = 0.05);
    std::string decide(const ObservationBundle& obs) override;
    std::string name() const override { return "oracle"; }

  private:
    TraversabilityGrid grid_;
    Vec2 goal_;
    OracleParams params_;
};

class ScriptedAgent : public AgentInterface {
  public:
    explicit ScriptedAgent(std::vector<std::string> lines)
        : lines_(std::move(lines)) {}
    std::string decide(const ObservationBundle&) override {
        if (next_ >= lines_.size()) return "stop";
        return lines_[next_++];
    }
    std::string name() const override { return "scripted"; }

  private:
    std::vector<std::string> lines_;
    std::size_t next_ = 0;
};

// Closed-loop rollout; deterministic in (scene, agent, cfg, seed). Agent
// failures (transport errors, unparseable output) terminate the episode with
// Termination::AgentError instead of propagating.
EpisodeRecord run_episode(const Scene& scene, AgentInterface& agent,
                          const EpisodeConfig& cfg, uint64_t seed);

// Renders a small top-down grayscale crop around the pose (PGM). Used for the
// frame files external agents receive; a stub for real camera rendering.
void render_frame(const Scene& scene, const Pose& pose,
                  const std::string& path);

struct LowLevelEvalConfig {
    double duration = 30.0;  // simulated seconds per variant
    uint64_t seed = 0;
    double dt = 0.02;
    double robot_radius = kDefaultRobotRadius;
    DynamicsParams dynamics;
    AvoidParams avoid;
    LidarConfig avoid_lidar = EpisodeConfig{}.avoid_lidar;
    HeightMapConfig avoid_heightmap = EpisodeConfig{}.avoid_heightmap;
    double scan_rate_hz = 15.0;
};

struct TrackingMetrics {
    double lin_vel_err = 0.0;     // mean |v_cmd - v| per control step
    double ang_vel_err = 0.0;
    double collision_rate = 0.0;  // percent of control steps in contact
};

struct LowLevelEvalReport {
    TrackingMetrics avoidance_off;
    TrackingMetrics avoidance_on;
};

// Drives a seeded piecewise-constant velocity-command schedule through the
// tracking dynamics, once blind and once with the reactive avoidance layer.
LowLevelEvalReport run_lowlevel_eval(const Scene& scene,
                                     const LowLevelEvalConfig& cfg = {});

}  // namespace midnav
