#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "midnav/action.hpp"
#include "midnav/geometry.hpp"
#include "midnav/lidar.hpp"
#include "midnav/scene.hpp"

namespace midnav {

struct VelocityCommand {
    double v = 0.0;         // m/s, signed
    double omega = 0.0;     // rad/s, signed, +left
    double duration = 0.0;  // seconds, > 0

    bool operator==(const VelocityCommand&) const = default;
};

struct RobotState {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;    // normalized to (-pi, pi]
    double v = 0.0;      // achieved linear velocity
    double omega = 0.0;  // achieved angular velocity
    double t = 0.0;      // seconds
};

// Fixed command velocities used to execute mid-level actions.
struct CommandProfile {
    double v_fwd = 0.5;          // m/s
    double omega_turn = kPi / 6; // rad/s
    double stop_hold = 0.5;      // seconds the stop command is held
};

// First-order tracking proxy for the learned velocity controller.
struct DynamicsParams {
    double tau_v = 0.2;       // linear tracking time constant, seconds
    double tau_omega = 0.2;   // angular tracking time constant
    double noise_sigma = 0.0; // stddev of velocity noise, applied when rng set
    double motor_strength = 1.0;
};

// Snapshot of joint-space quantities used by the reward terms.
struct JointSnapshot {
    std::vector<double> q;      // joint positions
    std::vector<double> qdot;   // joint velocities
    std::vector<double> qddot;  // joint accelerations
    std::vector<double> tau;    // joint torques
    double gravity_proj[3] = {0.0, 0.0, -1.0};  // base-frame gravity unit vector
    double body_height = 0.0;
    std::vector<double> feet_contact_force;  // newtons, per foot
    std::vector<double> feet_velocity;       // m/s, per foot
    double v_z = 0.0;
    double omega_xy[2] = {0.0, 0.0};
};

// Reward weights; defaults are the training-table values.
struct RewardWeights {
    double lin_track = 1.5;
    double ang_track = 1.5;
    double lin_z_penalty = -2.0;
    double ang_xy_penalty = -0.05;
    double flat = -2.0;
    double joint_acc = -2.5e-7;
    double energy = -2e-5;
    double body_height = -5.0;
    double feet_slip = 0.05;
    double h_target = 0.34;  // meters; not part of the table, Go2-scale default
};

// The table prints "Energy" and "Feet slipping" with a minus inside the
// expression as well as a signed weight. weight_times_magnitude drops the
// expression's sign and multiplies the weight by the non-negative magnitude;
// table_literal keeps the printed sign.
enum class RewardSignMode { WeightTimesMagnitude, TableLiteral };

struct RandomizationRanges {
    double body_mass[2] = {-3.0, 3.0};        // kg offset
    double static_friction[2] = {0.4, 4.0};
    double dynamic_friction[2] = {0.4, 4.0};
    double motor_strength[2] = {0.9, 1.1};
    int system_delay_steps = 1;  // degenerate [dt, dt] range: fixed one step
};

struct RandomizationSample {
    double body_mass_offset = 0.0;
    double static_friction = 1.0;
    double dynamic_friction = 1.0;
    double motor_strength = 1.0;
    int system_delay = 1;  // control steps
};

// Sector-based reactive avoidance parameters (see avoid_adjust).
struct AvoidParams {
    double lookahead = 0.6;       // meters ahead considered
    double block_height = 0.15;   // height-map value treated as an obstacle
    double corridor_half = 0.30;  // forward corridor half-width
    double omega_turn = kPi / 6;  // steering rate
    double stop_quantum = 0.02;   // duration of an emitted full-stop command
};

// Action -> velocity command with the profile's fixed velocities; durations
// chosen so the command covers the action's magnitude.
VelocityCommand interpret_action(const Action& action,
                                 const CommandProfile& profile = {});

// One control step: first-order velocity tracking toward the command, then
// unicycle pose integration. Gaussian velocity noise is added only when an
// rng is supplied and noise_sigma > 0. Requires 0 < dt <= 0.1.
RobotState step_dynamics(const RobotState& state, const VelocityCommand& cmd,
                         double dt, const DynamicsParams& params = {},
                         std::mt19937* rng = nullptr);

// True iff any occupied cell center lies within radius (closed boundary) of
// the state's position. Positions outside the scene count as collisions.
bool check_collision(const Scene& scene, const RobotState& state,
                     double radius = kDefaultRobotRadius);

// Weighted reward terms plus their sum under "total".
std::map<std::string, double> compute_reward_terms(
    const JointSnapshot& joints, const RobotState& state,
    const VelocityCommand& cmd, const RewardWeights& weights = {},
    RewardSignMode mode = RewardSignMode::WeightTimesMagnitude);

// Uniform draws inside the randomization table ranges; pure in seed.
RandomizationSample sample_randomization(uint64_t seed,
                                         const RandomizationRanges& ranges = {});

// Per-step proprioceptive vectors (layout in docs/obs-layout.md). The actor
// variant omits linear velocity; the critic variant includes it at offset 0.
std::vector<double> actor_proprio(const JointSnapshot& joints,
                                  const RobotState& state);
std::vector<double> critic_proprio(const JointSnapshot& joints,
                                   const RobotState& state);

// [history blocks | v_cmd, omega_cmd | height-map values]; all history
// blocks must be non-empty and equally sized. Throws LayoutMismatch.
std::vector<double> assemble_actor_obs(
    const std::vector<std::vector<double>>& history, const VelocityCommand& cmd,
    const HeightMap& hmap);

// [critic proprio | v_cmd, omega_cmd | privileged height scan].
std::vector<double> assemble_critic_obs(const JointSnapshot& joints,
                                        const RobotState& state,
                                        const VelocityCommand& cmd,
                                        const std::vector<double>& height_scan);

// Reactive height-map avoidance: keeps cmd when the forward corridor within
// lookahead is clear of values above block_height; otherwise rotates in place
// toward the lower-maximum side (tie -> left), or stops when both sides block.
VelocityCommand avoid_adjust(const VelocityCommand& cmd, const HeightMap& hmap,
                             const AvoidParams& params = {});

}  // namespace midnav
