#include "midnav/locomotion.hpp"

#include <algorithm>
#include <cmath>

#include "midnav/error.hpp"

namespace midnav {

namespace {

double squared_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

VelocityCommand interpret_action(const Action& action,
                                 const CommandProfile& profile) {
    switch (action.kind) {
        case ActionKind::Forward:
            return {profile.v_fwd, 0.0, action.magnitude / profile.v_fwd};
        case ActionKind::TurnLeft:
            return {0.0, profile.omega_turn,
                    deg_to_rad(action.magnitude) / profile.omega_turn};
        case ActionKind::TurnRight:
            return {0.0, -profile.omega_turn,
                    deg_to_rad(action.magnitude) / profile.omega_turn};
        case ActionKind::Stop:
            return {0.0, 0.0, profile.stop_hold};
    }
    return {};
}

RobotState step_dynamics(const RobotState& state, const VelocityCommand& cmd,
                         double dt, const DynamicsParams& params,
                         std::mt19937* rng) {
    if (!(dt > 0.0) || dt > 0.1)
        raise(ErrorCode::ValidationError, "dt must be in (0, 0.1]");

    // Clamped first-order update; tau <= dt snaps to the command.
    const double alpha_v = std::min(1.0, dt / std::max(params.tau_v, 1e-9));
    const double alpha_w = std::min(1.0, dt / std::max(params.tau_omega, 1e-9));

    RobotState next = state;
    next.v = state.v + (params.motor_strength * cmd.v - state.v) * alpha_v;
    next.omega =
        state.omega + (params.motor_strength * cmd.omega - state.omega) * alpha_w;

    if (rng != nullptr && params.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_sigma);
        next.v += noise(*rng);
        next.omega += noise(*rng);
    }

    next.x = state.x + next.v * std::cos(state.yaw) * dt;
    next.y = state.y + next.v * std::sin(state.yaw) * dt;
    next.yaw = wrap_angle(state.yaw + next.omega * dt);
    next.t = state.t + dt;
    return next;
}

bool check_collision(const Scene& scene, const RobotState& state,
                     double radius) {
    if (!scene.contains({state.x, state.y})) return true;

    const int reach =
        static_cast<int>(std::floor(radius / scene.cell_size)) + 2;
    const int cx = scene.cell_index_x(state.x);
    const int cy = scene.cell_index_y(state.y);
    for (int iy = cy - reach; iy <= cy + reach; ++iy) {
        for (int ix = cx - reach; ix <= cx + reach; ++ix) {
            if (!scene.in_bounds(ix, iy) || !scene.is_occupied(ix, iy)) continue;
            const Vec2 center = scene.cell_center(ix, iy);
            if (distance(center, {state.x, state.y}) <= radius) return true;
        }
    }
    return false;
}

std::map<std::string, double> compute_reward_terms(const JointSnapshot& joints,
                                                   const RobotState& state,
                                                   const VelocityCommand& cmd,
                                                   const RewardWeights& weights,
                                                   RewardSignMode mode) {
    const std::size_t n = joints.q.size();
    if (joints.qdot.size() != n || joints.qddot.size() != n ||
        joints.tau.size() != n || n == 0)
        raise(ErrorCode::DimensionMismatch,
              "joint arrays must share a common non-zero length");
    if (joints.feet_velocity.size() != joints.feet_contact_force.size())
        raise(ErrorCode::DimensionMismatch, "feet arrays must share length");

    // Body-frame lateral velocity is zero under the unicycle model, so the
    // tracking error reduces to the longitudinal component.
    const double lin_err_sq = (cmd.v - state.v) * (cmd.v - state.v);
    const double ang_err_sq = (cmd.omega - state.omega) * (cmd.omega - state.omega);

    double energy_mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = joints.tau[i] * joints.qdot[i];
        energy_mag += p * p;
    }
    double slip_mag = 0.0;
    for (std::size_t i = 0; i < joints.feet_velocity.size(); ++i) {
        if (joints.feet_contact_force[i] > 1.0)
            slip_mag += joints.feet_velocity[i] * joints.feet_velocity[i];
    }
    slip_mag = std::sqrt(slip_mag);

    const double g_xy_sq = joints.gravity_proj[0] * joints.gravity_proj[0] +
                           joints.gravity_proj[1] * joints.gravity_proj[1];
    const double omega_xy_sq = joints.omega_xy[0] * joints.omega_xy[0] +
                               joints.omega_xy[1] * joints.omega_xy[1];
    const double height_err = weights.h_target - joints.body_height;

    // Printed expressions for "Energy" and "Feet slipping" carry a leading
    // minus; table_literal keeps it, weight_times_magnitude drops it.
    const double literal = mode == RewardSignMode::TableLiteral ? -1.0 : 1.0;

    std::map<std::string, double> terms;
    terms["lin_track"] = weights.lin_track * std::exp(-lin_err_sq);
    terms["ang_track"] = weights.ang_track * std::exp(-ang_err_sq);
    terms["lin_z_penalty"] = weights.lin_z_penalty * joints.v_z * joints.v_z;
    terms["ang_xy_penalty"] = weights.ang_xy_penalty * omega_xy_sq;
    terms["flat"] = weights.flat * g_xy_sq;
    terms["joint_acc"] = weights.joint_acc * squared_norm(joints.qddot);
    terms["energy"] = weights.energy * literal * energy_mag;
    terms["body_height"] = weights.body_height * height_err * height_err;
    terms["feet_slip"] = weights.feet_slip * literal * slip_mag;

    double total = 0.0;
    for (const auto& [name, value] : terms) total += value;
    terms["total"] = total;
    return terms;
}

RandomizationSample sample_randomization(uint64_t seed,
                                         const RandomizationRanges& ranges) {
    std::mt19937_64 rng(seed);
    const auto uniform = [&rng](const double range[2]) {
        return std::uniform_real_distribution<double>(range[0], range[1])(rng);
    };
    RandomizationSample s;
    s.body_mass_offset = uniform(ranges.body_mass);
    s.static_friction = uniform(ranges.static_friction);
    s.dynamic_friction = uniform(ranges.dynamic_friction);
    s.motor_strength = uniform(ranges.motor_strength);
    s.system_delay = ranges.system_delay_steps;
    return s;
}

std::vector<double> actor_proprio(const JointSnapshot& joints,
                                  const RobotState& state) {
    std::vector<double> out;
    out.reserve(4 + 2 * joints.q.size());
    out.push_back(state.omega);
    out.push_back(joints.gravity_proj[0]);
    out.push_back(joints.gravity_proj[1]);
    out.push_back(joints.gravity_proj[2]);
    out.insert(out.end(), joints.q.begin(), joints.q.end());
    out.insert(out.end(), joints.qdot.begin(), joints.qdot.end());
    return out;
}

std::vector<double> critic_proprio(const JointSnapshot& joints,
                                   const RobotState& state) {
    std::vector<double> out;
    out.reserve(5 + 2 * joints.q.size());
    out.push_back(state.v);  // linear velocity, privileged
    out.push_back(state.omega);
    out.push_back(joints.gravity_proj[0]);
    out.push_back(joints.gravity_proj[1]);
    out.push_back(joints.gravity_proj[2]);
    out.insert(out.end(), joints.q.begin(), joints.q.end());
    out.insert(out.end(), joints.qdot.begin(), joints.qdot.end());
    return out;
}

std::vector<double> assemble_actor_obs(
    const std::vector<std::vector<double>>& history, const VelocityCommand& cmd,
    const HeightMap& hmap) {
    if (history.empty())
        raise(ErrorCode::LayoutMismatch, "history must be non-empty");
    const std::size_t per_step = history.front().size();
    if (per_step == 0)
        raise(ErrorCode::LayoutMismatch, "history blocks must be non-empty");
    for (const auto& block : history)
        if (block.size() != per_step)
            raise(ErrorCode::LayoutMismatch, "history blocks differ in size");

    std::vector<double> out;
    out.reserve(history.size() * per_step + 2 + hmap.values.size());
    for (const auto& block : history)
        out.insert(out.end(), block.begin(), block.end());
    out.push_back(cmd.v);
    out.push_back(cmd.omega);
    out.insert(out.end(), hmap.values.begin(), hmap.values.end());
    return out;
}

std::vector<double> assemble_critic_obs(const JointSnapshot& joints,
                                        const RobotState& state,
                                        const VelocityCommand& cmd,
                                        const std::vector<double>& height_scan) {
    std::vector<double> out = critic_proprio(joints, state);
    out.push_back(cmd.v);
    out.push_back(cmd.omega);
    out.insert(out.end(), height_scan.begin(), height_scan.end());
    return out;
}

VelocityCommand avoid_adjust(const VelocityCommand& cmd, const HeightMap& hmap,
                             const AvoidParams& params) {
    double forward_max = -1.0;
    double left_max = -1.0;
    double right_max = -1.0;

    for (int iy = 0; iy < hmap.ny; ++iy) {
        for (int ix = 0; ix < hmap.nx; ++ix) {
            const double x = hmap.cell_x(ix);
            if (x <= 0.0 || x > params.lookahead) continue;
            const double y = hmap.cell_y(iy);
            const double value = hmap.at(ix, iy);
            if (std::abs(y) <= params.corridor_half)
                forward_max = std::max(forward_max, value);
            if (y > 0.0) left_max = std::max(left_max, value);
            if (y < 0.0) right_max = std::max(right_max, value);
        }
    }

    if (forward_max <= params.block_height) return cmd;

    const bool left_blocked = left_max > params.block_height;
    const bool right_blocked = right_max > params.block_height;
    if (left_blocked && right_blocked)
        return {0.0, 0.0, params.stop_quantum};

    // Rotate in place toward the side whose sector reads lower (tie -> left).
    const double steer =
        left_max <= right_max ? params.omega_turn : -params.omega_turn;
    return {0.0, steer, cmd.duration};
}

}  // namespace midnav
