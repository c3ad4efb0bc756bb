#include "midnav/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "midnav/error.hpp"
#include "midnav/jsonio.hpp"

namespace midnav {

namespace {

struct MergedRun {
    Action action;
    int first = 0;  // index of the first source action in the run
};

bool mergeable(ActionKind kind) { return kind != ActionKind::Stop; }

std::vector<MergedRun> merge_runs(const std::vector<Action>& seq, int max_merge,
                                  const ActionBounds& bounds) {
    std::vector<MergedRun> runs;
    std::size_t i = 0;
    while (i < seq.size()) {
        const Action& head = seq[i];
        if (!mergeable(head.kind)) {
            runs.push_back({head, static_cast<int>(i)});
            ++i;
            continue;
        }
        const double limit = head.kind == ActionKind::Forward
                                 ? bounds.max_forward_m
                                 : bounds.max_turn_deg;
        Action merged = head;
        int used = 1;
        std::size_t j = i + 1;
        while (j < seq.size() && used < max_merge && seq[j].kind == head.kind &&
               merged.magnitude + seq[j].magnitude <= limit) {
            merged.magnitude += seq[j].magnitude;
            ++used;
            ++j;
        }
        runs.push_back({merged, static_cast<int>(i)});
        i = j;
    }
    return runs;
}

}  // namespace

const char* to_string(SftTask task) {
    return task == SftTask::Nav ? "nav" : "summarize";
}

std::vector<int> sample_frames(int t, int budget) {
    if (t < 0) raise(ErrorCode::ValidationError, "t must be >= 0");
    if (budget < 2) raise(ErrorCode::ValidationError, "budget must be >= 2");

    std::vector<int> indices;
    if (t <= budget - 1) {
        for (int i = 0; i < t; ++i) indices.push_back(i);
    } else {
        // K-1 evenly spaced history picks over 0..t-1; endpoints keep frame 0.
        const int picks = budget - 1;
        int last = -1;
        for (int i = 0; i < picks; ++i) {
            const int idx = static_cast<int>(
                std::lround(double(i) * double(t - 1) / double(picks - 1)));
            if (idx != last) indices.push_back(idx);
            last = idx;
        }
    }
    indices.push_back(t);
    return indices;
}

std::string build_nav_prompt(const std::string& instruction, int n_history) {
    if (instruction.empty())
        raise(ErrorCode::ValidationError, "instruction must be non-empty");

    std::ostringstream prompt;
    prompt << "You are a robot navigating an indoor space. "
              "Here is a video of historical observations:";
    int frame = 1;
    for (int i = 0; i < n_history; ++i) prompt << " <frame" << frame++ << ">";
    prompt << ", and the current observation: <frame" << frame << ">. ";
    prompt << "Your instruction is: " << instruction << " ";
    prompt << "What is the next action? Answer with one of: move forward "
              "<distance> cm, turn left <angle> degrees, turn right <angle> "
              "degrees, or stop.";
    return prompt.str();
}

std::string build_summarization_prompt(int n_frames) {
    if (n_frames < 1) raise(ErrorCode::ValidationError, "n_frames must be >= 1");

    std::ostringstream prompt;
    prompt << "Assume you are a robot designed for navigation. "
              "You are provided with captured image sequences:\n\n";
    for (int i = 1; i <= n_frames; ++i) prompt << "<frame" << i << ">";
    prompt << "\n\nBased on this image sequence, please describe the "
              "navigation trajectory of the robot.";
    return prompt.str();
}

std::vector<Action> merge_actions(const std::vector<Action>& seq, int max_merge,
                                  const ActionBounds& bounds) {
    if (max_merge < 1) raise(ErrorCode::ValidationError, "max_merge must be >= 1");
    std::vector<Action> out;
    for (const MergedRun& run : merge_runs(seq, max_merge, bounds))
        out.push_back(run.action);
    return out;
}

std::vector<SftSample> rebalance(const std::vector<SftSample>& samples,
                                 const RebalanceConfig& cfg) {
    if (samples.empty()) raise(ErrorCode::EmptyInput, "no samples");

    std::vector<SftSample> out = samples;

    // Class = action kind of nav labels; summaries are left alone.
    const auto kind_of = [](const SftSample& s) -> std::optional<ActionKind> {
        if (s.task != SftTask::Nav) return std::nullopt;
        return parse_action(s.label).action.kind;
    };

    std::map<ActionKind, std::vector<std::size_t>> originals;
    std::size_t nav_total = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (const auto k = kind_of(samples[i])) {
            originals[*k].push_back(i);
            ++nav_total;
        }
    }
    if (nav_total == 0) return out;

    std::map<ActionKind, std::size_t> count;
    for (const auto& [kind, indices] : originals) count[kind] = indices.size();
    std::size_t total = nav_total;

    std::mt19937_64 rng(cfg.seed);
    std::map<ActionKind, std::vector<std::size_t>> order;
    for (const auto& [kind, indices] : originals) {
        order[kind] = indices;
        std::shuffle(order[kind].begin(), order[kind].end(), rng);
    }

    // Duplicating one class dilutes the others, so sweep until stable.
    for (int pass = 0; pass < 16; ++pass) {
        bool changed = false;
        for (const auto& [kind, indices] : originals) {
            const std::size_t c = indices.size();
            const std::size_t cap = c * static_cast<std::size_t>(cfg.max_dup_factor);
            std::size_t n = count[kind];
            if (n >= cap) continue;
            if (double(n) / double(total) >= cfg.min_class_frac) continue;

            // Smallest n with n / (total - count + n) >= frac, then the cap.
            const double frac = cfg.min_class_frac;
            const std::size_t needed = static_cast<std::size_t>(
                std::ceil(frac * double(total - n) / (1.0 - frac)));
            std::size_t target = std::min(cap, needed);
            if (target <= n) continue;

            const auto& shuffled = order[kind];
            for (std::size_t add = 0; add < target - n; ++add)
                out.push_back(samples[shuffled[add % shuffled.size()]]);
            total += target - n;
            count[kind] = target;
            changed = true;
        }
        if (!changed) break;
    }
    return out;
}

EmitStats emit_sft(const std::string& episodes_path, const std::string& out_path,
                   const DatagenConfig& cfg) {
    EmitStats stats;
    std::vector<EpisodeRecord> episodes =
        read_episodes_jsonl(episodes_path, &stats.skipped_lines);
    stats.episodes = static_cast<int>(episodes.size());

    std::vector<SftSample> samples;
    for (const EpisodeRecord& ep : episodes) {
        std::vector<Action> actions;
        std::size_t usable = ep.decisions.size();
        if (ep.termination == Termination::AgentError && usable > 0)
            --usable;  // the failing decision carries no valid action
        for (std::size_t i = 0; i < usable; ++i)
            actions.push_back(ep.decisions[i].action);
        if (actions.empty()) continue;

        const auto ref_for = [&](int idx) -> std::string {
            if (idx < static_cast<int>(ep.frame_refs.size()))
                return ep.frame_refs[static_cast<std::size_t>(idx)];
            return ep.scene_id + "-f" + std::to_string(idx);
        };

        for (const MergedRun& run : merge_runs(actions, cfg.max_merge, {})) {
            const auto indices = sample_frames(run.first, cfg.frames_budget);
            SftSample sample;
            sample.task = SftTask::Nav;
            sample.scene_id = ep.scene_id;
            sample.step_index = run.first;
            for (int idx : indices) sample.frame_refs.push_back(ref_for(idx));
            sample.prompt = build_nav_prompt(
                ep.instruction, static_cast<int>(indices.size()) - 1);
            sample.label = format_action(run.action);
            samples.push_back(std::move(sample));
            ++stats.nav_samples;
        }

        const int last = static_cast<int>(usable) - 1;
        const auto indices = sample_frames(last, cfg.frames_budget);
        SftSample summary;
        summary.task = SftTask::Summarize;
        summary.scene_id = ep.scene_id;
        summary.step_index = static_cast<int>(usable);
        for (int idx : indices) summary.frame_refs.push_back(ref_for(idx));
        summary.prompt =
            build_summarization_prompt(static_cast<int>(indices.size()));
        summary.label = ep.instruction;
        samples.push_back(std::move(summary));
        ++stats.summarize_samples;
    }

    std::stable_sort(samples.begin(), samples.end(),
                     [](const SftSample& a, const SftSample& b) {
                         if (a.scene_id != b.scene_id)
                             return a.scene_id < b.scene_id;
                         return a.step_index < b.step_index;
                     });

    if (cfg.apply_rebalance && !samples.empty())
        samples = rebalance(samples, cfg.rebalance);
    stats.emitted = static_cast<int>(samples.size());

    std::ofstream out(out_path);
    if (!out) raise(ErrorCode::IoError, "cannot write: " + out_path);
    for (const SftSample& s : samples) out << to_json(s).dump() << "\n";
    return stats;
}

}  // namespace midnav
