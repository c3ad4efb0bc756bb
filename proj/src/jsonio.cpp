#include "midnav/jsonio.hpp"

#include <chrono>
#include <fstream>

#include "midnav/error.hpp"
#include "midnav/version.hpp"

namespace midnav {

using nlohmann::json;

namespace {

ActionKind kind_from_string(const std::string& s) {
    if (s == "forward") return ActionKind::Forward;
    if (s == "turn_left") return ActionKind::TurnLeft;
    if (s == "turn_right") return ActionKind::TurnRight;
    if (s == "stop") return ActionKind::Stop;
    raise(ErrorCode::SchemaError, "unknown action kind: " + s);
}

Termination termination_from_string(const std::string& s) {
    if (s == "stop") return Termination::Stop;
    if (s == "max_decisions") return Termination::MaxDecisions;
    if (s == "collision_terminate") return Termination::CollisionTerminate;
    if (s == "agent_error") return Termination::AgentError;
    raise(ErrorCode::SchemaError, "unknown termination: " + s);
}

json pose_json(const Pose& p) {
    return {{"x", p.x}, {"y", p.y}, {"yaw", p.yaw}};
}

Pose pose_from(const json& j) {
    return {j.at("x").get<double>(), j.at("y").get<double>(),
            j.at("yaw").get<double>()};
}

}  // namespace

json to_json(const Action& action) {
    return {{"kind", to_string(action.kind)}, {"magnitude", action.magnitude}};
}

Action action_from_json(const json& j) {
    return {kind_from_string(j.at("kind").get<std::string>()),
            j.at("magnitude").get<double>()};
}

json to_json(const ParseReport& report) {
    return {{"action", to_json(report.action)},
            {"matched_span", {report.span_begin, report.span_end}},
            {"canonical_text", report.canonical_text}};
}

json to_json(const EpisodeRecord& record) {
    json decisions = json::array();
    for (const DecisionRecord& d : record.decisions) {
        decisions.push_back({{"raw_text", d.raw_text},
                             {"action", to_json(d.action)},
                             {"command",
                              {{"v", d.command.v},
                               {"omega", d.command.omega},
                               {"duration", d.command.duration}}},
                             {"start_pose", pose_json(d.start_pose)},
                             {"end_pose", pose_json(d.end_pose)},
                             {"collided", d.collided}});
    }

    json trajectory = json::array();
    for (const TrajectorySample& s : record.trajectory) {
        trajectory.push_back({s.t, s.x, s.y, s.yaw, s.v, s.omega, s.v_cmd,
                              s.omega_cmd, s.collided ? 1 : 0, s.decision,
                              s.stop_step ? 1 : 0});
    }

    json j = {{"schema_version", 1},
              {"scene_id", record.scene_id},
              {"instruction", record.instruction},
              {"decisions", decisions},
              {"trajectory", trajectory},
              {"frame_refs", record.frame_refs},
              {"stop_issued", record.stop_issued},
              {"termination", to_string(record.termination)},
              {"wall_time", record.wall_time},
              {"seed", record.seed}};
    if (!record.agent_error.empty()) j["agent_error"] = record.agent_error;
    return j;
}

EpisodeRecord episode_from_json(const json& j) {
    EpisodeRecord record;
    record.scene_id = j.at("scene_id").get<std::string>();
    record.instruction = j.at("instruction").get<std::string>();
    for (const json& d : j.at("decisions")) {
        DecisionRecord dec;
        dec.raw_text = d.at("raw_text").get<std::string>();
        dec.action = action_from_json(d.at("action"));
        dec.command = {d.at("command").at("v").get<double>(),
                       d.at("command").at("omega").get<double>(),
                       d.at("command").at("duration").get<double>()};
        dec.start_pose = pose_from(d.at("start_pose"));
        dec.end_pose = pose_from(d.at("end_pose"));
        dec.collided = d.at("collided").get<bool>();
        record.decisions.push_back(std::move(dec));
    }
    for (const json& s : j.at("trajectory")) {
        if (!s.is_array() || s.size() != 11)
            raise(ErrorCode::SchemaError, "bad trajectory sample");
        record.trajectory.push_back(
            {s[0].get<double>(), s[1].get<double>(), s[2].get<double>(),
             s[3].get<double>(), s[4].get<double>(), s[5].get<double>(),
             s[6].get<double>(), s[7].get<double>(), s[8].get<int>() != 0,
             s[9].get<int>(), s[10].get<int>() != 0});
    }
    if (j.contains("frame_refs"))
        record.frame_refs = j.at("frame_refs").get<std::vector<std::string>>();
    record.stop_issued = j.at("stop_issued").get<bool>();
    record.termination =
        termination_from_string(j.at("termination").get<std::string>());
    record.wall_time = j.at("wall_time").get<double>();
    record.seed = j.at("seed").get<uint64_t>();
    if (j.contains("agent_error"))
        record.agent_error = j.at("agent_error").get<std::string>();
    return record;
}

json to_json(const SftSample& sample) {
    return {{"schema_version", 1},
            {"task", to_string(sample.task)},
            {"prompt", sample.prompt},
            {"frame_refs", sample.frame_refs},
            {"label", sample.label},
            {"meta",
             {{"scene_id", sample.scene_id},
              {"step_index", sample.step_index},
              {"task", to_string(sample.task)}}}};
}

json to_json(const AggregateReport& report) {
    return {{"count", report.count},
            {"NE", report.ne},
            {"OS", report.os},
            {"SR", report.sr},
            {"SPL", report.spl},
            {"nDTW", report.ndtw},
            {"Linear Vel. Error", report.lin_vel_err},
            {"Angular Vel. Error", report.ang_vel_err},
            {"Collision Rate", report.collision_rate},
            {"collision_rate_unit", "percent of control steps"}};
}

void write_episodes_jsonl(const std::vector<EpisodeRecord>& records,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoError, "cannot write: " + path);
    for (const EpisodeRecord& r : records)
        out << to_json(r).dump() << "\n";
}

std::vector<EpisodeRecord> read_episodes_jsonl(const std::string& path,
                                               int* skipped) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoError, "cannot read: " + path);
    std::vector<EpisodeRecord> records;
    std::string line;
    int bad = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            records.push_back(episode_from_json(json::parse(line)));
        } catch (const std::exception&) {
            ++bad;
        }
    }
    if (skipped != nullptr) *skipped = bad;
    return records;
}

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const json& parameters,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    const auto now = std::chrono::system_clock::now();
    const auto epoch_s =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
            .count();
    json manifest = {{"tool", "midnav"},
                     {"version", kVersion},
                     {"subcommand", subcommand},
                     {"parameters", parameters},
                     {"inputs", inputs},
                     {"outputs", outputs},
                     {"created_unix_s", epoch_s}};
    std::ofstream out(out_path);
    if (!out) raise(ErrorCode::IoError, "cannot write manifest: " + out_path);
    out << manifest.dump(2) << "\n";
}

}  // namespace midnav
