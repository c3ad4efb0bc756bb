#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "midnav/action.hpp"

namespace midnav {

enum class SftTask { Nav, Summarize };

const char* to_string(SftTask task);

struct SftSample {
    SftTask task = SftTask::Nav;
    std::string prompt;
    std::vector<std::string> frame_refs;  // history..., current last
    std::string label;  // canonical action text (nav) or instruction (summarize)
    std::string scene_id;
    int step_index = 0;
};

// Frame indices for a decision with t preceding frames under a total budget of
// K frames: the current frame t is always last; history is all of 0..t-1 when
// it fits, otherwise unique(round(linspace(0, t-1, K-1))), which always keeps
// frame 0.
std::vector<int> sample_frames(int t, int budget);

// Navigation task prompt with the history/current textual cues and 1-based
// positional <frame{i}> placeholders.
std::string build_nav_prompt(const std::string& instruction, int n_history);

// Trajectory-summarization prompt template with n_frames placeholders.
std::string build_summarization_prompt(int n_frames);

// Greedy left-to-right merge of same-kind runs, summing magnitudes, at most
// max_merge source actions per output and never past the action magnitude
// bounds; Stop never merges.
std::vector<Action> merge_actions(const std::vector<Action>& seq,
                                  int max_merge = 3,
                                  const ActionBounds& bounds = {});

struct RebalanceConfig {
    double min_class_frac = 0.08;
    int max_dup_factor = 5;
    uint64_t seed = 0;
};

// Oversamples underrepresented nav-label action kinds by duplication until
// each kind reaches min_class_frac of the nav samples or its duplication
// factor hits the cap. Originals are always retained, order preserved,
// duplicates appended deterministically.
std::vector<SftSample> rebalance(const std::vector<SftSample>& samples,
                                 const RebalanceConfig& cfg = {});

struct DatagenConfig {
    int frames_budget = 8;
    int max_merge = 3;
    RebalanceConfig rebalance;
    bool apply_rebalance = true;
};

struct EmitStats {
    int episodes = 0;
    int skipped_lines = 0;
    int nav_samples = 0;
    int summarize_samples = 0;
    int emitted = 0;
};

// Reads an episode JSONL file and writes SFT samples (JSONL): one nav sample
// per merged action step plus one summarization sample per episode; malformed
// lines are skipped and counted. Byte-deterministic for fixed inputs and seed.
EmitStats emit_sft(const std::string& episodes_path,
                   const std::string& out_path, const DatagenConfig& cfg = {});

}  // namespace midnav
