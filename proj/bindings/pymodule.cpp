#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "midnav/action.hpp"
#include "midnav/datagen.hpp"
#include "midnav/episode.hpp"
#include "midnav/error.hpp"
#include "midnav/http_agent.hpp"
#include "midnav/jsonio.hpp"
#include "midnav/lidar.hpp"
#include "midnav/locomotion.hpp"
#include "midnav/metrics.hpp"
#include "midnav/scene.hpp"
#include "midnav/version.hpp"

namespace py = pybind11;
using namespace midnav;

namespace {

// Lets Python code implement the agent side of run_episode.
class PyAgent : public AgentInterface {
  public:
    using AgentInterface::AgentInterface;
    std::string decide(const ObservationBundle& obs) override {
        PYBIND11_OVERRIDE_PURE(std::string, AgentInterface, decide, obs);
    }
    std::string name() const override {
        PYBIND11_OVERRIDE(std::string, AgentInterface, name);
    }
};

}  // namespace

PYBIND11_MODULE(_midnav, m) {
    m.doc() = "mid-level action navigation harness";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "MidnavError");

    py::enum_<ActionKind>(m, "ActionKind")
        .value("FORWARD", ActionKind::Forward)
        .value("TURN_LEFT", ActionKind::TurnLeft)
        .value("TURN_RIGHT", ActionKind::TurnRight)
        .value("STOP", ActionKind::Stop);

    py::class_<Action>(m, "Action")
        .def(py::init([](ActionKind kind, double magnitude) {
                 return make_action(kind, magnitude);
             }),
             py::arg("kind"), py::arg("magnitude") = 0.0)
        .def_readonly("kind", &Action::kind)
        .def_readonly("magnitude", &Action::magnitude)
        .def("__eq__", [](const Action& a, const Action& b) { return a == b; })
        .def("__repr__", [](const Action& a) {
            return "Action(" + std::string(to_string(a.kind)) + ", " +
                   std::to_string(a.magnitude) + ")";
        });

    py::class_<ParseReport>(m, "ParseReport")
        .def_readonly("action", &ParseReport::action)
        .def_readonly("span_begin", &ParseReport::span_begin)
        .def_readonly("span_end", &ParseReport::span_end)
        .def_readonly("canonical_text", &ParseReport::canonical_text);

    m.def("parse_action",
          [](const std::string& text) { return parse_action(text); },
          py::arg("text"));
    m.def("parse_all",
          [](const std::string& text) { return parse_all(text); },
          py::arg("text"));
    m.def("format_action", &format_action, py::arg("action"));

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y);

    py::class_<Pose>(m, "Pose")
        .def(py::init<double, double, double>(), py::arg("x") = 0.0,
             py::arg("y") = 0.0, py::arg("yaw") = 0.0)
        .def_readwrite("x", &Pose::x)
        .def_readwrite("y", &Pose::y)
        .def_readwrite("yaw", &Pose::yaw);

    py::class_<Scene>(m, "Scene")
        .def_readonly("scene_id", &Scene::scene_id)
        .def_readonly("cell_size", &Scene::cell_size)
        .def_readonly("width", &Scene::width)
        .def_readonly("height", &Scene::height)
        .def_readonly("occupied", &Scene::occupied)
        .def_readonly("ground_height", &Scene::ground_height)
        .def_readonly("start_pose", &Scene::start_pose)
        .def_readonly("goal", &Scene::goal)
        .def_readonly("reference_path", &Scene::reference_path)
        .def_readonly("instruction", &Scene::instruction);

    py::class_<SceneGenParams>(m, "SceneGenParams")
        .def(py::init<>())
        .def_readwrite("size_m", &SceneGenParams::size_m)
        .def_readwrite("obstacle_density", &SceneGenParams::obstacle_density)
        .def_readwrite("min_clearance", &SceneGenParams::min_clearance)
        .def_readwrite("cell_size", &SceneGenParams::cell_size);

    m.def("load_scene", &load_scene, py::arg("path"));
    m.def("save_scene", &save_scene, py::arg("scene"), py::arg("path"));
    m.def("generate_scene", &generate_scene, py::arg("seed"),
          py::arg("params") = SceneGenParams{});
    m.def("add_path_clutter", &add_path_clutter, py::arg("scene"),
          py::arg("seed"), py::arg("count") = 2,
          py::arg("min_goal_distance") = 4.0, py::arg("max_goal_distance") = 5.5);

    py::class_<TraversabilityGrid>(m, "TraversabilityGrid")
        .def_readonly("cell_size", &TraversabilityGrid::cell_size)
        .def_readonly("width", &TraversabilityGrid::width)
        .def_readonly("height", &TraversabilityGrid::height)
        .def_readonly("blocked", &TraversabilityGrid::blocked);

    m.def("inflate", &inflate, py::arg("scene"),
          py::arg("radius") = kDefaultRobotRadius);
    m.def("geodesic_distance", &geodesic_distance, py::arg("grid"),
          py::arg("a"), py::arg("b"));
    m.def("shortest_path", &shortest_path, py::arg("grid"), py::arg("a"),
          py::arg("b"));
    m.def("distance_field", &distance_field, py::arg("grid"), py::arg("source"));

    py::class_<VelocityCommand>(m, "VelocityCommand")
        .def(py::init<double, double, double>(), py::arg("v") = 0.0,
             py::arg("omega") = 0.0, py::arg("duration") = 0.0)
        .def_readwrite("v", &VelocityCommand::v)
        .def_readwrite("omega", &VelocityCommand::omega)
        .def_readwrite("duration", &VelocityCommand::duration);

    py::class_<RobotState>(m, "RobotState")
        .def(py::init<>())
        .def_readwrite("x", &RobotState::x)
        .def_readwrite("y", &RobotState::y)
        .def_readwrite("yaw", &RobotState::yaw)
        .def_readwrite("v", &RobotState::v)
        .def_readwrite("omega", &RobotState::omega)
        .def_readwrite("t", &RobotState::t);

    py::class_<CommandProfile>(m, "CommandProfile")
        .def(py::init<>())
        .def_readwrite("v_fwd", &CommandProfile::v_fwd)
        .def_readwrite("omega_turn", &CommandProfile::omega_turn)
        .def_readwrite("stop_hold", &CommandProfile::stop_hold);

    py::class_<DynamicsParams>(m, "DynamicsParams")
        .def(py::init<>())
        .def_readwrite("tau_v", &DynamicsParams::tau_v)
        .def_readwrite("tau_omega", &DynamicsParams::tau_omega)
        .def_readwrite("noise_sigma", &DynamicsParams::noise_sigma)
        .def_readwrite("motor_strength", &DynamicsParams::motor_strength);

    m.def("interpret_action", &interpret_action, py::arg("action"),
          py::arg("profile") = CommandProfile{});
    m.def(
        "step_dynamics",
        [](const RobotState& s, const VelocityCommand& cmd, double dt,
           const DynamicsParams& params) {
            return step_dynamics(s, cmd, dt, params, nullptr);
        },
        py::arg("state"), py::arg("command"), py::arg("dt") = 0.02,
        py::arg("params") = DynamicsParams{});
    m.def("check_collision", &check_collision, py::arg("scene"),
          py::arg("state"), py::arg("radius") = kDefaultRobotRadius);

    py::class_<JointSnapshot>(m, "JointSnapshot")
        .def(py::init<>())
        .def_readwrite("q", &JointSnapshot::q)
        .def_readwrite("qdot", &JointSnapshot::qdot)
        .def_readwrite("qddot", &JointSnapshot::qddot)
        .def_readwrite("tau", &JointSnapshot::tau)
        .def_readwrite("body_height", &JointSnapshot::body_height)
        .def_readwrite("feet_contact_force", &JointSnapshot::feet_contact_force)
        .def_readwrite("feet_velocity", &JointSnapshot::feet_velocity)
        .def_readwrite("v_z", &JointSnapshot::v_z)
        .def_property(
            "gravity_proj",
            [](const JointSnapshot& j) {
                return std::vector<double>(j.gravity_proj, j.gravity_proj + 3);
            },
            [](JointSnapshot& j, const std::vector<double>& g) {
                for (std::size_t i = 0; i < 3 && i < g.size(); ++i)
                    j.gravity_proj[i] = g[i];
            })
        .def_property(
            "omega_xy",
            [](const JointSnapshot& j) {
                return std::vector<double>(j.omega_xy, j.omega_xy + 2);
            },
            [](JointSnapshot& j, const std::vector<double>& w) {
                for (std::size_t i = 0; i < 2 && i < w.size(); ++i)
                    j.omega_xy[i] = w[i];
            });

    py::class_<RewardWeights>(m, "RewardWeights")
        .def(py::init<>())
        .def_readwrite("lin_track", &RewardWeights::lin_track)
        .def_readwrite("ang_track", &RewardWeights::ang_track)
        .def_readwrite("lin_z_penalty", &RewardWeights::lin_z_penalty)
        .def_readwrite("ang_xy_penalty", &RewardWeights::ang_xy_penalty)
        .def_readwrite("flat", &RewardWeights::flat)
        .def_readwrite("joint_acc", &RewardWeights::joint_acc)
        .def_readwrite("energy", &RewardWeights::energy)
        .def_readwrite("body_height", &RewardWeights::body_height)
        .def_readwrite("feet_slip", &RewardWeights::feet_slip)
        .def_readwrite("h_target", &RewardWeights::h_target);

    py::enum_<RewardSignMode>(m, "RewardSignMode")
        .value("WEIGHT_TIMES_MAGNITUDE", RewardSignMode::WeightTimesMagnitude)
        .value("TABLE_LITERAL", RewardSignMode::TableLiteral);

    m.def("compute_reward_terms", &compute_reward_terms, py::arg("joints"),
          py::arg("state"), py::arg("command"),
          py::arg("weights") = RewardWeights{},
          py::arg("mode") = RewardSignMode::WeightTimesMagnitude);

    py::class_<RandomizationSample>(m, "RandomizationSample")
        .def_readonly("body_mass_offset", &RandomizationSample::body_mass_offset)
        .def_readonly("static_friction", &RandomizationSample::static_friction)
        .def_readonly("dynamic_friction", &RandomizationSample::dynamic_friction)
        .def_readonly("motor_strength", &RandomizationSample::motor_strength)
        .def_readonly("system_delay", &RandomizationSample::system_delay);
    m.def(
        "sample_randomization",
        [](uint64_t seed) { return sample_randomization(seed); },
        py::arg("seed"));

    py::class_<LidarConfig>(m, "LidarConfig")
        .def(py::init<>())
        .def_readwrite("channels", &LidarConfig::channels)
        .def_readwrite("horizontal_resolution_deg",
                       &LidarConfig::horizontal_resolution_deg)
        .def_readwrite("max_range", &LidarConfig::max_range)
        .def_readwrite("mount_height", &LidarConfig::mount_height)
        .def_readwrite("range_noise_sigma", &LidarConfig::range_noise_sigma)
        .def_property(
            "vertical_range_deg",
            [](const LidarConfig& c) {
                return std::pair<double, double>(c.vertical_range_deg[0],
                                                 c.vertical_range_deg[1]);
            },
            [](LidarConfig& c, std::pair<double, double> v) {
                c.vertical_range_deg[0] = v.first;
                c.vertical_range_deg[1] = v.second;
            })
        .def_property(
            "horizontal_range_deg",
            [](const LidarConfig& c) {
                return std::pair<double, double>(c.horizontal_range_deg[0],
                                                 c.horizontal_range_deg[1]);
            },
            [](LidarConfig& c, std::pair<double, double> v) {
                c.horizontal_range_deg[0] = v.first;
                c.horizontal_range_deg[1] = v.second;
            });

    py::class_<Point3>(m, "Point3")
        .def_readonly("x", &Point3::x)
        .def_readonly("y", &Point3::y)
        .def_readonly("z", &Point3::z);

    py::class_<PointCloud>(m, "PointCloud")
        .def(py::init<>())
        .def_readwrite("points", &PointCloud::points)
        .def_readwrite("stamp", &PointCloud::stamp);

    py::class_<HeightMapConfig>(m, "HeightMapConfig")
        .def(py::init<>())
        .def_readwrite("voxel_size", &HeightMapConfig::voxel_size)
        .def_readwrite("temporal_window", &HeightMapConfig::temporal_window)
        .def_property(
            "x_range",
            [](const HeightMapConfig& c) {
                return std::pair<double, double>(c.x_range[0], c.x_range[1]);
            },
            [](HeightMapConfig& c, std::pair<double, double> v) {
                c.x_range[0] = v.first;
                c.x_range[1] = v.second;
            })
        .def_property(
            "y_range",
            [](const HeightMapConfig& c) {
                return std::pair<double, double>(c.y_range[0], c.y_range[1]);
            },
            [](HeightMapConfig& c, std::pair<double, double> v) {
                c.y_range[0] = v.first;
                c.y_range[1] = v.second;
            })
        .def_property(
            "z_clip",
            [](const HeightMapConfig& c) {
                return std::pair<double, double>(c.z_clip[0], c.z_clip[1]);
            },
            [](HeightMapConfig& c, std::pair<double, double> v) {
                c.z_clip[0] = v.first;
                c.z_clip[1] = v.second;
            });

    py::class_<HeightMap>(m, "HeightMap")
        .def_readonly("nx", &HeightMap::nx)
        .def_readonly("ny", &HeightMap::ny)
        .def_readonly("values", &HeightMap::values)
        .def_readonly("valid", &HeightMap::valid)
        .def_readonly("config", &HeightMap::config);

    m.def("simulate_scan", &simulate_scan, py::arg("scene"), py::arg("pose"),
          py::arg("config") = LidarConfig{}, py::arg("seed") = 0);
    m.def("voxelize_heightmap", &voxelize_heightmap, py::arg("cloud"),
          py::arg("config") = HeightMapConfig{});
    m.def("temporal_max", &temporal_max, py::arg("window"));

    py::class_<AvoidParams>(m, "AvoidParams")
        .def(py::init<>())
        .def_readwrite("lookahead", &AvoidParams::lookahead)
        .def_readwrite("block_height", &AvoidParams::block_height)
        .def_readwrite("corridor_half", &AvoidParams::corridor_half)
        .def_readwrite("omega_turn", &AvoidParams::omega_turn);
    m.def("avoid_adjust", &avoid_adjust, py::arg("command"), py::arg("hmap"),
          py::arg("params") = AvoidParams{});

    py::class_<ObservationBundle>(m, "ObservationBundle")
        .def_readonly("scene_id", &ObservationBundle::scene_id)
        .def_readonly("instruction", &ObservationBundle::instruction)
        .def_readonly("history_refs", &ObservationBundle::history_refs)
        .def_readonly("current_ref", &ObservationBundle::current_ref)
        .def_readonly("pose", &ObservationBundle::pose)
        .def_readonly("decision_index", &ObservationBundle::decision_index);

    py::class_<AgentInterface, PyAgent>(m, "AgentInterface")
        .def(py::init<>())
        .def("decide", &AgentInterface::decide)
        .def("name", &AgentInterface::name);

    py::class_<OracleParams>(m, "OracleParams")
        .def(py::init<>())
        .def_readwrite("fwd_step", &OracleParams::fwd_step)
        .def_readwrite("turn_step_deg", &OracleParams::turn_step_deg)
        .def_readwrite("stop_radius", &OracleParams::stop_radius);

    py::class_<OracleAgent, AgentInterface>(m, "OracleAgent")
        .def(py::init<const Scene&, const OracleParams&, double, double>(),
             py::arg("scene"), py::arg("params") = OracleParams{},
             py::arg("robot_radius") = kDefaultRobotRadius,
             py::arg("planning_margin") = 0.05);

    py::class_<ScriptedAgent, AgentInterface>(m, "ScriptedAgent")
        .def(py::init<std::vector<std::string>>(), py::arg("lines"));

    py::enum_<Termination>(m, "Termination")
        .value("STOP", Termination::Stop)
        .value("MAX_DECISIONS", Termination::MaxDecisions)
        .value("COLLISION_TERMINATE", Termination::CollisionTerminate)
        .value("AGENT_ERROR", Termination::AgentError);

    py::class_<EpisodeConfig>(m, "EpisodeConfig")
        .def(py::init<>())
        .def_readwrite("max_decisions", &EpisodeConfig::max_decisions)
        .def_readwrite("success_radius", &EpisodeConfig::success_radius)
        .def_readwrite("dt", &EpisodeConfig::dt)
        .def_readwrite("frames_budget", &EpisodeConfig::frames_budget)
        .def_readwrite("avoidance_enabled", &EpisodeConfig::avoidance_enabled)
        .def_readwrite("robot_radius", &EpisodeConfig::robot_radius)
        .def_readwrite("profile", &EpisodeConfig::profile)
        .def_readwrite("dynamics", &EpisodeConfig::dynamics)
        .def_readwrite("avoid", &EpisodeConfig::avoid)
        .def_readwrite("frames_dir", &EpisodeConfig::frames_dir);

    py::class_<DecisionRecord>(m, "DecisionRecord")
        .def_readonly("raw_text", &DecisionRecord::raw_text)
        .def_readonly("action", &DecisionRecord::action)
        .def_readonly("command", &DecisionRecord::command)
        .def_readonly("start_pose", &DecisionRecord::start_pose)
        .def_readonly("end_pose", &DecisionRecord::end_pose)
        .def_readonly("collided", &DecisionRecord::collided);

    py::class_<TrajectorySample>(m, "TrajectorySample")
        .def_readonly("t", &TrajectorySample::t)
        .def_readonly("x", &TrajectorySample::x)
        .def_readonly("y", &TrajectorySample::y)
        .def_readonly("yaw", &TrajectorySample::yaw)
        .def_readonly("v", &TrajectorySample::v)
        .def_readonly("omega", &TrajectorySample::omega)
        .def_readonly("v_cmd", &TrajectorySample::v_cmd)
        .def_readonly("omega_cmd", &TrajectorySample::omega_cmd)
        .def_readonly("collided", &TrajectorySample::collided)
        .def_readonly("decision", &TrajectorySample::decision);

    py::class_<EpisodeRecord>(m, "EpisodeRecord")
        .def_readonly("scene_id", &EpisodeRecord::scene_id)
        .def_readonly("instruction", &EpisodeRecord::instruction)
        .def_readonly("decisions", &EpisodeRecord::decisions)
        .def_readonly("trajectory", &EpisodeRecord::trajectory)
        .def_readonly("frame_refs", &EpisodeRecord::frame_refs)
        .def_readonly("stop_issued", &EpisodeRecord::stop_issued)
        .def_readonly("termination", &EpisodeRecord::termination)
        .def_readonly("wall_time", &EpisodeRecord::wall_time)
        .def_readonly("seed", &EpisodeRecord::seed)
        .def_readonly("agent_error", &EpisodeRecord::agent_error)
        .def("to_json", [](const EpisodeRecord& r) { return to_json(r).dump(); });

    m.def("run_episode", &run_episode, py::arg("scene"), py::arg("agent"),
          py::arg("config") = EpisodeConfig{}, py::arg("seed") = 0);
    m.def("oracle_next_action", &oracle_next_action, py::arg("grid"),
          py::arg("pose"), py::arg("goal"), py::arg("params") = OracleParams{});
    m.def("traj_to_actions", &traj_to_actions, py::arg("poses"),
          py::arg("fwd_quantum") = 0.25, py::arg("turn_quantum_deg") = 15.0);

    py::class_<MetricConfig>(m, "MetricConfig")
        .def(py::init<>())
        .def_readwrite("success_radius", &MetricConfig::success_radius)
        .def_readwrite("euclidean_ne", &MetricConfig::euclidean_ne);

    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("ne", &MetricReport::ne)
        .def_readonly("os", &MetricReport::os)
        .def_readonly("sr", &MetricReport::sr)
        .def_readonly("spl", &MetricReport::spl)
        .def_readonly("ndtw", &MetricReport::ndtw)
        .def_readonly("lin_vel_err", &MetricReport::lin_vel_err)
        .def_readonly("ang_vel_err", &MetricReport::ang_vel_err)
        .def_readonly("collision_rate", &MetricReport::collision_rate);

    py::class_<AggregateReport>(m, "AggregateReport")
        .def_readonly("count", &AggregateReport::count)
        .def_readonly("ne", &AggregateReport::ne)
        .def_readonly("os", &AggregateReport::os)
        .def_readonly("sr", &AggregateReport::sr)
        .def_readonly("spl", &AggregateReport::spl)
        .def_readonly("ndtw", &AggregateReport::ndtw)
        .def_readonly("collision_rate", &AggregateReport::collision_rate);

    m.def("evaluate_episode", &evaluate_episode, py::arg("record"),
          py::arg("scene"), py::arg("config") = MetricConfig{},
          py::arg("robot_radius") = kDefaultRobotRadius);
    m.def("aggregate", &aggregate, py::arg("reports"));
    m.def("dtw", &dtw, py::arg("a"), py::arg("b"));
    m.def("ndtw", &ndtw, py::arg("executed"), py::arg("reference"),
          py::arg("d_th") = 3.0);
    m.def("navigation_error", &navigation_error, py::arg("grid"),
          py::arg("final_pos"), py::arg("goal"), py::arg("euclidean") = false);
    m.def("resample_polyline", &resample_polyline, py::arg("points"),
          py::arg("spacing"));

    m.def("sample_frames", &sample_frames, py::arg("t"), py::arg("budget"));
    m.def("build_nav_prompt", &build_nav_prompt, py::arg("instruction"),
          py::arg("n_history"));
    m.def("build_summarization_prompt", &build_summarization_prompt,
          py::arg("n_frames"));
    py::class_<ActionBounds>(m, "ActionBounds")
        .def(py::init<>())
        .def_readwrite("max_forward_m", &ActionBounds::max_forward_m)
        .def_readwrite("max_turn_deg", &ActionBounds::max_turn_deg);

    m.def("merge_actions", &merge_actions, py::arg("actions"),
          py::arg("max_merge") = 3, py::arg("bounds") = ActionBounds{});

    py::class_<DatagenConfig>(m, "DatagenConfig")
        .def(py::init<>())
        .def_readwrite("frames_budget", &DatagenConfig::frames_budget)
        .def_readwrite("max_merge", &DatagenConfig::max_merge)
        .def_readwrite("apply_rebalance", &DatagenConfig::apply_rebalance);

    py::class_<EmitStats>(m, "EmitStats")
        .def_readonly("episodes", &EmitStats::episodes)
        .def_readonly("skipped_lines", &EmitStats::skipped_lines)
        .def_readonly("nav_samples", &EmitStats::nav_samples)
        .def_readonly("summarize_samples", &EmitStats::summarize_samples)
        .def_readonly("emitted", &EmitStats::emitted);

    m.def("emit_sft", &emit_sft, py::arg("episodes_path"), py::arg("out_path"),
          py::arg("config") = DatagenConfig{});

    m.def("write_episodes_jsonl", &write_episodes_jsonl, py::arg("records"),
          py::arg("path"));
    m.def(
        "read_episodes_jsonl",
        [](const std::string& path) { return read_episodes_jsonl(path); },
        py::arg("path"));
}
