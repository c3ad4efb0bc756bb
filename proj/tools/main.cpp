#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "midnav/datagen.hpp"
#include "midnav/episode.hpp"
#include "midnav/error.hpp"
#include "midnav/http_agent.hpp"
#include "midnav/jsonio.hpp"
#include "midnav/metrics.hpp"
#include "midnav/scene.hpp"
#include "midnav/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace midnav;

namespace {

void emit_error(const std::string& code, const std::string& message) {
    const json err = {{"error", {{"code", code}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

std::vector<std::string> scene_files(const std::string& path) {
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.path().extension() == ".json" &&
                entry.path().string().find(".manifest.") == std::string::npos)
                files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    if (files.empty())
        raise(ErrorCode::IoError, "no scene files under: " + path);
    return files;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot read: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot read config: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        raise(ErrorCode::SchemaError, std::string("bad config JSON: ") + e.what());
    }
}

// config file fills in everything the command line left untouched
template <typename T>
void merge_config(const json& section, const char* key, const CLI::Option* opt,
                  T& value) {
    if (opt != nullptr && opt->count() > 0) return;
    if (section.contains(key)) value = section.at(key).get<T>();
}

struct RunArgs {
    std::string agent = "oracle";
    std::string scenes;
    std::string endpoint;
    std::string script_path;
    std::string out = "episodes.jsonl";
    std::string config_path;
    std::string render_frames;
    std::string collision_policy = "block";
    int frames_budget = 8;
    uint64_t seed = 0;
    int workers = 1;
    int max_decisions = 50;
    double success_radius = 3.0;
    bool avoidance = false;
    double timeout_s = 30.0;
    int retries = 2;
};

int cmd_run(const RunArgs& args, const CLI::App& sub) {
    EpisodeConfig cfg;
    const json config = load_config(args.config_path);
    const json episode_section =
        config.contains("episode") ? config.at("episode") : json::object();
    const json locomotion_section =
        config.contains("locomotion") ? config.at("locomotion") : json::object();

    cfg.max_decisions = args.max_decisions;
    cfg.success_radius = args.success_radius;
    cfg.frames_budget = args.frames_budget;
    cfg.avoidance_enabled = args.avoidance;
    cfg.frames_dir = args.render_frames;
    merge_config(episode_section, "max_decisions",
                 sub.get_option("--max-decisions"), cfg.max_decisions);
    merge_config(episode_section, "success_radius",
                 sub.get_option("--success-radius"), cfg.success_radius);
    merge_config(episode_section, "frames_budget",
                 sub.get_option("--frames-budget"), cfg.frames_budget);
    merge_config(episode_section, "avoidance_enabled",
                 sub.get_option("--avoidance"), cfg.avoidance_enabled);
    merge_config(episode_section, "dt", nullptr, cfg.dt);
    merge_config(episode_section, "settle_slack", nullptr, cfg.settle_slack);
    merge_config(episode_section, "scan_rate_hz", nullptr, cfg.scan_rate_hz);
    merge_config(locomotion_section, "v_fwd", nullptr, cfg.profile.v_fwd);
    merge_config(locomotion_section, "omega_turn", nullptr,
                 cfg.profile.omega_turn);
    merge_config(locomotion_section, "stop_hold", nullptr, cfg.profile.stop_hold);
    merge_config(locomotion_section, "tau_v", nullptr, cfg.dynamics.tau_v);
    merge_config(locomotion_section, "tau_omega", nullptr, cfg.dynamics.tau_omega);
    merge_config(locomotion_section, "noise_sigma", nullptr,
                 cfg.dynamics.noise_sigma);
    merge_config(locomotion_section, "motor_strength", nullptr,
                 cfg.dynamics.motor_strength);

    std::string policy = args.collision_policy;
    merge_config(episode_section, "collision_policy",
                 sub.get_option("--collision-policy"), policy);
    if (policy == "terminate")
        cfg.collision_policy = EpisodeConfig::CollisionPolicy::Terminate;
    else if (policy == "block")
        cfg.collision_policy = EpisodeConfig::CollisionPolicy::Block;
    else
        raise(ErrorCode::UsageError, "collision policy must be block|terminate");

    if (args.agent == "external" && args.endpoint.empty())
        raise(ErrorCode::UsageError,
              "--endpoint (or VLN_AGENT_ENDPOINT) is required for external");
    if (args.agent == "scripted" && args.script_path.empty())
        raise(ErrorCode::UsageError, "--script is required for scripted");

    const auto files = scene_files(args.scenes);
    std::vector<Scene> scenes;
    scenes.reserve(files.size());
    for (const auto& f : files) scenes.push_back(load_scene(f));

    std::vector<std::string> script;
    if (!args.script_path.empty()) script = read_lines(args.script_path);

    std::vector<EpisodeRecord> records(scenes.size());
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    const auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= scenes.size() || failed.load()) break;
            try {
                std::unique_ptr<AgentInterface> agent;
                if (args.agent == "oracle")
                    agent = std::make_unique<OracleAgent>(scenes[i]);
                else if (args.agent == "scripted")
                    agent = std::make_unique<ScriptedAgent>(script);
                else if (args.agent == "external")
                    agent = std::make_unique<ExternalAgent>(HttpAgentConfig{
                        args.endpoint, args.timeout_s, args.retries});
                else
                    raise(ErrorCode::UsageError,
                          "agent must be oracle|scripted|external");
                records[i] = run_episode(scenes[i], *agent, cfg, args.seed + i);
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                failure = e.what();
                failed.store(true);
                break;
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(args.workers,
                                                    int(scenes.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) raise(ErrorCode::IoError, "episode failed: " + failure);

    write_episodes_jsonl(records, args.out);

    json params = {{"agent", args.agent},
                   {"scenes", args.scenes},
                   {"endpoint", args.endpoint},
                   {"script", args.script_path},
                   {"frames_budget", cfg.frames_budget},
                   {"seed", args.seed},
                   {"workers", n_workers},
                   {"max_decisions", cfg.max_decisions},
                   {"success_radius", cfg.success_radius},
                   {"avoidance_enabled", cfg.avoidance_enabled},
                   {"collision_policy", policy},
                   {"config", args.config_path},
                   {"render_frames", args.render_frames},
                   {"dt", cfg.dt},
                   {"tau_v", cfg.dynamics.tau_v},
                   {"tau_omega", cfg.dynamics.tau_omega},
                   {"noise_sigma", cfg.dynamics.noise_sigma},
                   {"v_fwd", cfg.profile.v_fwd},
                   {"omega_turn", cfg.profile.omega_turn}};
    write_manifest(args.out + ".manifest.json", "run", params, files,
                   {args.out});

    int stops = 0;
    for (const auto& r : records) stops += r.stop_issued ? 1 : 0;
    std::cout << json{{"episodes", records.size()},
                      {"stop_issued", stops},
                      {"out", args.out}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_eval(const std::string& episodes_path, const std::string& scenes_path,
             const std::string& out, double success_radius, bool euclidean) {
    int skipped_lines = 0;
    const auto records = read_episodes_jsonl(episodes_path, &skipped_lines);

    std::map<std::string, Scene> scenes;
    for (const auto& f : scene_files(scenes_path)) {
        Scene scene = load_scene(f);
        scenes.emplace(scene.scene_id, std::move(scene));
    }

    MetricConfig cfg;
    cfg.success_radius = success_radius;
    cfg.euclidean_ne = euclidean;

    std::vector<MetricReport> reports;
    json per_episode = json::array();
    int unmatched = 0;
    for (const auto& record : records) {
        const auto it = scenes.find(record.scene_id);
        if (it == scenes.end()) {
            ++unmatched;
            continue;
        }
        const MetricReport r = evaluate_episode(record, it->second, cfg);
        reports.push_back(r);
        per_episode.push_back({{"scene_id", record.scene_id},
                               {"seed", record.seed},
                               {"NE", r.ne},
                               {"OS", r.os},
                               {"SR", r.sr},
                               {"SPL", r.spl},
                               {"nDTW", r.ndtw},
                               {"Linear Vel. Error", r.lin_vel_err},
                               {"Angular Vel. Error", r.ang_vel_err},
                               {"Collision Rate", r.collision_rate},
                               {"termination", to_string(record.termination)}});
    }
    if (reports.empty())
        raise(ErrorCode::EmptyInput, "no episodes matched the given scenes");

    json report = to_json(aggregate(reports));
    report["skipped_lines"] = skipped_lines;
    report["unmatched_episodes"] = unmatched;
    report["episodes"] = per_episode;

    std::ofstream file(out);
    if (!file) raise(ErrorCode::IoError, "cannot write: " + out);
    file << report.dump(2) << "\n";

    write_manifest(out + ".manifest.json", "eval",
                   {{"episodes", episodes_path},
                    {"scenes", scenes_path},
                    {"success_radius", success_radius},
                    {"euclidean_ne", euclidean}},
                   {episodes_path, scenes_path}, {out});

    json summary = to_json(aggregate(reports));
    summary["count"] = reports.size();
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_scene_gen(uint64_t seed, double density, double size, double clearance,
                  double cell_size, const std::string& ground, double ground_scale,
                  bool clutter, const std::string& out) {
    SceneGenParams params;
    params.obstacle_density = density;
    params.size_m = size;
    params.min_clearance = clearance;
    params.cell_size = cell_size;
    params.ground_scale = ground_scale;
    if (ground == "ramp")
        params.ground = SceneGenParams::Ground::Ramp;
    else if (ground == "steps")
        params.ground = SceneGenParams::Ground::Steps;
    else if (ground != "flat")
        raise(ErrorCode::UsageError, "ground must be flat|ramp|steps");

    Scene scene = generate_scene(seed, params);
    if (clutter) scene = add_path_clutter(scene, seed + 1);
    save_scene(scene, out);

    write_manifest(out + ".manifest.json", "scene gen",
                   {{"seed", seed},
                    {"density", density},
                    {"size", size},
                    {"clearance", clearance},
                    {"cell_size", cell_size},
                    {"ground", ground},
                    {"ground_scale", ground_scale},
                    {"clutter", clutter}},
                   {}, {out});
    std::cout << json{{"scene_id", scene.scene_id}, {"out", out}}.dump() << "\n";
    return 0;
}

int cmd_heightmap(const std::string& scene_path, const std::string& pose_text,
                  const std::string& out) {
    const Scene scene = load_scene(scene_path);
    double x = 0.0, y = 0.0, yaw = 0.0;
    if (std::sscanf(pose_text.c_str(), "%lf,%lf,%lf", &x, &y, &yaw) != 3)
        raise(ErrorCode::UsageError, "--pose expects x,y,yaw");

    const RobotState pose{x, y, yaw, 0, 0, 0};
    const PointCloud cloud = simulate_scan(scene, pose);
    const HeightMap map = voxelize_heightmap(cloud);

    json j = {{"nx", map.nx},
              {"ny", map.ny},
              {"voxel_size", map.config.voxel_size},
              {"x_range", {map.config.x_range[0], map.config.x_range[1]}},
              {"y_range", {map.config.y_range[0], map.config.y_range[1]}},
              {"z_clip", {map.config.z_clip[0], map.config.z_clip[1]}},
              {"points", cloud.points.size()},
              {"values", map.values},
              {"valid", map.valid}};
    std::ofstream file(out);
    if (!file) raise(ErrorCode::IoError, "cannot write: " + out);
    file << j.dump() << "\n";

    write_manifest(out + ".manifest.json", "heightmap",
                   {{"scene", scene_path}, {"pose", pose_text}}, {scene_path},
                   {out});
    std::cout << json{{"nx", map.nx}, {"ny", map.ny}, {"out", out}}.dump()
              << "\n";
    return 0;
}

int cmd_datagen(const std::string& episodes, const std::string& out,
                int frames_budget, int max_merge, double min_class_frac,
                int max_dup_factor, uint64_t seed, bool no_rebalance) {
    DatagenConfig cfg;
    cfg.frames_budget = frames_budget;
    cfg.max_merge = max_merge;
    cfg.rebalance.min_class_frac = min_class_frac;
    cfg.rebalance.max_dup_factor = max_dup_factor;
    cfg.rebalance.seed = seed;
    cfg.apply_rebalance = !no_rebalance;

    const EmitStats stats = emit_sft(episodes, out, cfg);
    write_manifest(out + ".manifest.json", "datagen",
                   {{"episodes", episodes},
                    {"frames_budget", frames_budget},
                    {"max_merge", max_merge},
                    {"min_class_frac", min_class_frac},
                    {"max_dup_factor", max_dup_factor},
                    {"seed", seed},
                    {"rebalance", !no_rebalance}},
                   {episodes}, {out});
    std::cout << json{{"episodes", stats.episodes},
                      {"skipped_lines", stats.skipped_lines},
                      {"nav_samples", stats.nav_samples},
                      {"summarize_samples", stats.summarize_samples},
                      {"emitted", stats.emitted},
                      {"out", out}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_lowlevel_eval(const std::string& scene_path, double duration,
                      uint64_t seed, double tau_v, double tau_omega,
                      const std::string& out) {
    const Scene scene = load_scene(scene_path);
    LowLevelEvalConfig cfg;
    cfg.duration = duration;
    cfg.seed = seed;
    cfg.dynamics.tau_v = tau_v;
    cfg.dynamics.tau_omega = tau_omega;

    const LowLevelEvalReport report = run_lowlevel_eval(scene, cfg);
    const auto variant = [](const TrackingMetrics& m) {
        return json{{"Linear Vel. Error", m.lin_vel_err},
                    {"Angular Vel. Error", m.ang_vel_err},
                    {"Collision Rate", m.collision_rate}};
    };
    json j = {{"avoidance_off", variant(report.avoidance_off)},
              {"avoidance_on", variant(report.avoidance_on)},
              {"duration_s", duration},
              {"seed", seed},
              {"collision_rate_unit", "percent of control steps"}};
    std::cout << j.dump(2) << "\n";

    if (!out.empty()) {
        std::ofstream file(out);
        if (!file) raise(ErrorCode::IoError, "cannot write: " + out);
        file << j.dump(2) << "\n";
        write_manifest(out + ".manifest.json", "lowlevel-eval",
                       {{"scene", scene_path},
                        {"duration", duration},
                        {"seed", seed},
                        {"tau_v", tau_v},
                        {"tau_omega", tau_omega}},
                       {scene_path}, {out});
    }
    return 0;
}

int cmd_mock_agent(int port, const std::string& script_path,
                   const std::vector<std::string>& oracle_scene_paths) {
    MockAgentServer::Options opts;
    opts.port = port;
    if (!script_path.empty()) opts.script = read_lines(script_path);
    for (const auto& path : oracle_scene_paths)
        opts.oracle_scenes.push_back(load_scene(path));
    if (opts.script.empty() && opts.oracle_scenes.empty())
        raise(ErrorCode::UsageError, "need --script or --oracle-scene");

    MockAgentServer server(std::move(opts));
    server.start();
    std::cout << json{{"endpoint", server.endpoint()}}.dump() << "\n"
              << std::flush;

    // serve until interrupted
    static std::atomic<bool> interrupted{false};
    std::signal(SIGINT, [](int) { interrupted.store(true); });
    std::signal(SIGTERM, [](int) { interrupted.store(true); });
    while (!interrupted.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"midnav: mid-level action navigation harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "parse an action mention");
    std::string parse_text;
    parse_cmd->add_option("--text", parse_text, "text to parse")->required();

    // scene gen
    auto* scene_cmd = app.add_subcommand("scene", "scene tools");
    scene_cmd->require_subcommand(1);
    auto* gen_cmd = scene_cmd->add_subcommand("gen", "generate a scene");
    uint64_t gen_seed = 0;
    double gen_density = 0.1, gen_size = 12.0, gen_clearance = 0.7,
           gen_cell = 0.1, gen_ground_scale = 0.3;
    std::string gen_out = "scene.json", gen_ground = "flat";
    bool gen_clutter = false;
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--density", gen_density, "obstacle density");
    gen_cmd->add_option("--size", gen_size, "room edge length, meters");
    gen_cmd->add_option("--clearance", gen_clearance, "min corridor width");
    gen_cmd->add_option("--cell-size", gen_cell, "grid cell size, meters");
    gen_cmd->add_option("--ground", gen_ground, "flat|ramp|steps");
    gen_cmd->add_option("--ground-scale", gen_ground_scale, "peak ground height");
    gen_cmd->add_flag("--clutter", gen_clutter, "add on-path clutter");
    gen_cmd->add_option("--out", gen_out, "output scene file")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "run episodes");
    RunArgs run_args;
    run_cmd->add_option("--agent", run_args.agent, "oracle|scripted|external");
    run_cmd->add_option("--scenes", run_args.scenes, "scene file or directory")
        ->required();
    run_cmd->add_option("--endpoint", run_args.endpoint, "agent endpoint URL")
        ->envname("VLN_AGENT_ENDPOINT");
    run_cmd->add_option("--script", run_args.script_path,
                        "response lines for the scripted agent");
    run_cmd->add_option("--frames-budget", run_args.frames_budget,
                        "frames per observation (8-64)");
    run_cmd->add_option("--seed", run_args.seed, "base seed");
    run_cmd->add_option("--workers", run_args.workers, "episode workers");
    run_cmd->add_option("--max-decisions", run_args.max_decisions,
                        "decision budget per episode");
    run_cmd->add_option("--success-radius", run_args.success_radius,
                        "success radius, meters");
    run_cmd->add_flag("--avoidance", run_args.avoidance,
                      "enable the reactive avoidance layer");
    run_cmd->add_option("--collision-policy", run_args.collision_policy,
                        "block|terminate");
    run_cmd->add_option("--render-frames", run_args.render_frames,
                        "directory for rendered observation frames");
    run_cmd->add_option("--timeout", run_args.timeout_s,
                        "external agent timeout, seconds");
    run_cmd->add_option("--retries", run_args.retries,
                        "external agent retries");
    run_cmd->add_option("--config", run_args.config_path,
                        "JSON config file (sections: episode, locomotion)");
    run_cmd->add_option("--out", run_args.out, "episodes JSONL path")
        ->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score recorded episodes");
    std::string eval_episodes, eval_scenes, eval_out = "report.json";
    double eval_radius = 3.0;
    bool eval_euclidean = false;
    eval_cmd->add_option("--episodes", eval_episodes, "episodes JSONL")
        ->required();
    eval_cmd->add_option("--scenes", eval_scenes, "scene file or directory")
        ->required();
    eval_cmd->add_option("--out", eval_out, "report JSON path");
    eval_cmd->add_option("--success-radius", eval_radius, "meters");
    eval_cmd->add_flag("--euclidean-ne", eval_euclidean,
                       "straight-line NE instead of geodesic");

    // datagen
    auto* datagen_cmd = app.add_subcommand("datagen", "emit SFT samples");
    std::string dg_episodes, dg_out = "sft.jsonl";
    int dg_frames = 8, dg_merge = 3, dg_cap = 5;
    double dg_frac = 0.08;
    uint64_t dg_seed = 0;
    bool dg_no_rebalance = false;
    datagen_cmd->add_option("--episodes", dg_episodes, "episodes JSONL")
        ->required();
    datagen_cmd->add_option("--frames-budget", dg_frames, "frames per sample");
    datagen_cmd->add_option("--max-merge", dg_merge,
                            "max consecutive actions merged");
    datagen_cmd->add_option("--min-class-frac", dg_frac,
                            "rebalancing target fraction");
    datagen_cmd->add_option("--max-dup-factor", dg_cap,
                            "rebalancing duplication cap");
    datagen_cmd->add_option("--seed", dg_seed, "rebalancing seed");
    datagen_cmd->add_flag("--no-rebalance", dg_no_rebalance,
                          "skip label rebalancing");
    datagen_cmd->add_option("--out", dg_out, "SFT JSONL path");

    // heightmap
    auto* hm_cmd = app.add_subcommand("heightmap", "debug the height map");
    std::string hm_scene, hm_pose = "0,0,0", hm_out = "map.json";
    hm_cmd->add_option("--scene", hm_scene, "scene file")->required();
    hm_cmd->add_option("--pose", hm_pose, "x,y,yaw");
    hm_cmd->add_option("--out", hm_out, "height map JSON path");

    // lowlevel-eval
    auto* ll_cmd = app.add_subcommand("lowlevel-eval",
                                      "velocity tracking evaluation");
    std::string ll_scene, ll_out;
    double ll_duration = 30.0, ll_tau_v = 0.2, ll_tau_omega = 0.2;
    uint64_t ll_seed = 0;
    ll_cmd->add_option("--scene", ll_scene, "scene file")->required();
    ll_cmd->add_option("--duration", ll_duration, "simulated seconds");
    ll_cmd->add_option("--seed", ll_seed, "schedule seed");
    ll_cmd->add_option("--tau-v", ll_tau_v, "linear tracking constant");
    ll_cmd->add_option("--tau-omega", ll_tau_omega, "angular tracking constant");
    ll_cmd->add_option("--out", ll_out, "report JSON path (optional)");

    // mock-agent
    auto* mock_cmd = app.add_subcommand("mock-agent", "serve a test agent");
    int mock_port = 0;
    std::string mock_script;
    std::vector<std::string> mock_scenes;
    mock_cmd->add_option("--port", mock_port, "port (0 picks a free one)");
    mock_cmd->add_option("--script", mock_script, "scripted response lines");
    mock_cmd->add_option("--oracle-scene", mock_scenes,
                         "scene file for oracle mode (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("UsageError", e.what());
        return 2;
    }

    try {
        if (*parse_cmd) {
            std::cout << to_json(parse_action(parse_text)).dump() << "\n";
            return 0;
        }
        if (*gen_cmd)
            return cmd_scene_gen(gen_seed, gen_density, gen_size, gen_clearance,
                                 gen_cell, gen_ground, gen_ground_scale,
                                 gen_clutter, gen_out);
        if (*run_cmd) return cmd_run(run_args, *run_cmd);
        if (*eval_cmd)
            return cmd_eval(eval_episodes, eval_scenes, eval_out, eval_radius,
                            eval_euclidean);
        if (*datagen_cmd)
            return cmd_datagen(dg_episodes, dg_out, dg_frames, dg_merge, dg_frac,
                               dg_cap, dg_seed, dg_no_rebalance);
        if (*hm_cmd) return cmd_heightmap(hm_scene, hm_pose, hm_out);
        if (*ll_cmd)
            return cmd_lowlevel_eval(ll_scene, ll_duration, ll_seed, ll_tau_v,
                                     ll_tau_omega, ll_out);
        if (*mock_cmd) return cmd_mock_agent(mock_port, mock_script, mock_scenes);
        emit_error("UsageError", "no subcommand given");
        return 2;
    } catch (const Error& e) {
        emit_error(to_string(e.code()), e.what());
        return e.code() == ErrorCode::UsageError ? 2 : 1;
    } catch (const std::exception& e) {
        emit_error("InternalError", e.what());
        return 1;
    }
}
