#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "midnav/datagen.hpp"
#include "midnav/episode.hpp"
#include "midnav/error.hpp"
#include "midnav/jsonio.hpp"
#include "support/builders.hpp"

using namespace midnav;
using namespace midnav::testing;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Scene small_room() {
    std::vector<std::string> rows(30, std::string(60, '.'));
    for (auto& c : rows.front()) c = '#';
    for (auto& c : rows.back()) c = '#';
    for (auto& row : rows) {
        row.front() = '#';
        row.back() = '#';
    }
    Scene scene = scene_from_ascii(rows, 0.1);
    scene.scene_id = "datagen-room";
    scene.start_pose = {1.05, 1.55, 0.0};
    scene.goal = {3.05, 1.55};
    for (int k = 0; k <= 8; ++k)
        scene.reference_path.push_back({1.05 + 0.25 * k, 1.55});
    scene.instruction = "go forward to the goal and stop";
    return scene;
}

SftSample nav_sample(ActionKind kind, double magnitude, int step) {
    SftSample s;
    s.task = SftTask::Nav;
    s.scene_id = "x";
    s.step_index = step;
    s.label = format_action({kind, magnitude});
    s.prompt = "p";
    s.frame_refs = {"f0"};
    return s;
}

}  // namespace

TEST_CASE("sample_frames formula") {
    CHECK(sample_frames(0, 8) == std::vector<int>{0});
    CHECK(sample_frames(3, 8) == std::vector<int>{0, 1, 2, 3});
    CHECK(sample_frames(8, 5) == std::vector<int>{0, 2, 5, 7, 8});
    CHECK(sample_frames(1, 8) == std::vector<int>{0, 1});
    CHECK_THROWS_AS(sample_frames(-1, 8), Error);
    CHECK_THROWS_AS(sample_frames(3, 1), Error);
}

TEST_CASE("sample_frames properties") {
    std::mt19937 rng(2);
    std::uniform_int_distribution<int> t_dist(0, 200);
    std::uniform_int_distribution<int> k_dist(2, 64);
    for (int trial = 0; trial < 2000; ++trial) {
        const int t = t_dist(rng);
        const int k = k_dist(rng);
        const auto idx = sample_frames(t, k);
        REQUIRE(!idx.empty());
        CHECK(idx.back() == t);
        CHECK(static_cast<int>(idx.size()) <= k);
        for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i] > idx[i - 1]);
        if (t >= 1) CHECK(idx.front() == 0);
    }
}

TEST_CASE("navigation prompt carries the cue strings in order") {
    const std::string p = build_nav_prompt("go to the chair", 2);
    const auto hist = p.find("a video of historical observations:");
    const auto curr = p.find("current observation:");
    const auto instr = p.find("go to the chair");
    REQUIRE(hist != std::string::npos);
    REQUIRE(curr != std::string::npos);
    REQUIRE(instr != std::string::npos);
    CHECK(hist < curr);
    CHECK(curr < instr);

    // 2 history placeholders + 1 current
    CHECK(p.find("<frame1>") != std::string::npos);
    CHECK(p.find("<frame2>") != std::string::npos);
    CHECK(p.find("<frame3>") != std::string::npos);
    CHECK(p.find("<frame4>") == std::string::npos);

    // history cue survives the degenerate zero-history form
    const std::string p0 = build_nav_prompt("go", 0);
    CHECK(p0.find("a video of historical observations:") != std::string::npos);
    CHECK(p0.find("<frame1>") != std::string::npos);
    CHECK(p0.find("<frame2>") == std::string::npos);

    CHECK(build_nav_prompt("go to the chair", 2) == p);
    CHECK_THROWS_AS(build_nav_prompt("", 2), Error);
}

TEST_CASE("summarization prompt template") {
    const std::string p = build_summarization_prompt(3);
    CHECK(p.rfind("Assume you are a robot designed for navigation.", 0) == 0);
    CHECK(p.find("<frame1><frame2><frame3>") != std::string::npos);
    CHECK(p.find("<frame4>") == std::string::npos);
    const std::string tail =
        "please describe the navigation trajectory of the robot.";
    CHECK(p.substr(p.size() - tail.size()) == tail);

    CHECK(build_summarization_prompt(1).find("<frame1>") != std::string::npos);
    CHECK(build_summarization_prompt(3) == p);
    CHECK_THROWS_AS(build_summarization_prompt(0), Error);
}

TEST_CASE("merge_actions combines same-kind runs up to the cap") {
    using A = Action;
    const std::vector<A> two{{ActionKind::Forward, 0.25},
                             {ActionKind::Forward, 0.25}};
    const auto merged2 = merge_actions(two);
    REQUIRE(merged2.size() == 1);
    CHECK(merged2[0] == A{ActionKind::Forward, 0.5});

    const std::vector<A> four(4, A{ActionKind::Forward, 0.25});
    const auto merged4 = merge_actions(four);
    REQUIRE(merged4.size() == 2);
    CHECK(merged4[0] == A{ActionKind::Forward, 0.75});
    CHECK(merged4[1] == A{ActionKind::Forward, 0.25});

    const std::vector<A> opposite{{ActionKind::TurnLeft, 15.0},
                                  {ActionKind::TurnRight, 15.0}};
    CHECK(merge_actions(opposite) == opposite);

    // stop never merges
    const std::vector<A> with_stop{{ActionKind::Stop, 0.0},
                                   {ActionKind::Stop, 0.0}};
    CHECK(merge_actions(with_stop).size() == 2);

    // runs never merge past the magnitude bounds
    const std::vector<A> big{{ActionKind::Forward, 3.0},
                             {ActionKind::Forward, 3.0}};
    CHECK(merge_actions(big).size() == 2);
    const std::vector<A> wide{{ActionKind::TurnLeft, 100.0},
                              {ActionKind::TurnLeft, 100.0}};
    CHECK(merge_actions(wide).size() == 2);
}

TEST_CASE("merge_actions preserves magnitude sums per kind") {
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_real_distribution<double> fwd(0.05, 1.0);
    std::uniform_real_distribution<double> deg(5.0, 45.0);

    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Action> seq;
        const int n = 1 + trial % 12;
        for (int i = 0; i < n; ++i) {
            switch (kind(rng)) {
                case 0: seq.push_back({ActionKind::Forward, fwd(rng)}); break;
                case 1: seq.push_back({ActionKind::TurnLeft, deg(rng)}); break;
                case 2: seq.push_back({ActionKind::TurnRight, deg(rng)}); break;
                default: seq.push_back({ActionKind::Stop, 0.0}); break;
            }
        }
        const auto merged = merge_actions(seq);

        double sum_before[4] = {0, 0, 0, 0};
        double sum_after[4] = {0, 0, 0, 0};
        for (const Action& a : seq)
            sum_before[static_cast<int>(a.kind)] += a.magnitude;
        for (const Action& a : merged) {
            sum_after[static_cast<int>(a.kind)] += a.magnitude;
            CHECK(a.magnitude <= (a.kind == ActionKind::Forward ? 5.0 : 180.0) +
                                     1e-12);
        }
        for (int k = 0; k < 4; ++k)
            CHECK(sum_after[k] == doctest::Approx(sum_before[k]).epsilon(1e-12));
        CHECK(merged.size() <= seq.size());
    }
}

TEST_CASE("rebalance duplicates rare kinds up to the cap") {
    std::vector<SftSample> samples;
    for (int i = 0; i < 99; ++i)
        samples.push_back(nav_sample(ActionKind::Forward, 0.25, i));
    samples.push_back(nav_sample(ActionKind::Stop, 0.0, 99));

    const RebalanceConfig cfg{.min_class_frac = 0.05, .max_dup_factor = 5,
                              .seed = 1};
    const auto out = rebalance(samples, cfg);

    int stops = 0;
    int forwards = 0;
    for (const auto& s : out) {
        const auto kind = parse_action(s.label).action.kind;
        stops += kind == ActionKind::Stop;
        forwards += kind == ActionKind::Forward;
    }
    CHECK(forwards == 99);   // originals retained
    CHECK(stops == 5);       // factor cap binds: 1 original x 5
    CHECK(out.size() == samples.size() + 4);

    // originals keep their order as a prefix
    for (std::size_t i = 0; i < samples.size(); ++i)
        CHECK(out[i].step_index == samples[i].step_index);
}

TEST_CASE("rebalance leaves balanced inputs unchanged") {
    std::vector<SftSample> samples;
    for (int i = 0; i < 10; ++i) {
        samples.push_back(nav_sample(ActionKind::Forward, 0.25, 4 * i));
        samples.push_back(nav_sample(ActionKind::TurnLeft, 15, 4 * i + 1));
        samples.push_back(nav_sample(ActionKind::TurnRight, 15, 4 * i + 2));
        samples.push_back(nav_sample(ActionKind::Stop, 0, 4 * i + 3));
    }
    const auto out = rebalance(samples, {});
    CHECK(out.size() == samples.size());
}

TEST_CASE("rebalance satisfies the cap-aware fraction bound") {
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> counts(0, 40);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SftSample> samples;
        int step = 0;
        const int nf = 1 + counts(rng);
        const int nl = counts(rng);
        const int ns = counts(rng) / 10;
        for (int i = 0; i < nf; ++i)
            samples.push_back(nav_sample(ActionKind::Forward, 0.5, step++));
        for (int i = 0; i < nl; ++i)
            samples.push_back(nav_sample(ActionKind::TurnLeft, 30, step++));
        for (int i = 0; i < ns; ++i)
            samples.push_back(nav_sample(ActionKind::Stop, 0, step++));

        const RebalanceConfig cfg{.min_class_frac = 0.08, .max_dup_factor = 5,
                                  .seed = 11};
        const auto out = rebalance(samples, cfg);
        CHECK(out.size() >= samples.size());  // never deletes

        int total = 0;
        int per_kind[4] = {0, 0, 0, 0};
        int original[4] = {0, 0, 0, 0};
        for (const auto& s : samples)
            ++original[static_cast<int>(parse_action(s.label).action.kind)];
        for (const auto& s : out) {
            ++per_kind[static_cast<int>(parse_action(s.label).action.kind)];
            ++total;
        }
        for (int k = 0; k < 4; ++k) {
            if (original[k] == 0) {
                CHECK(per_kind[k] == 0);  // no synthesis
                continue;
            }
            const double frac = double(per_kind[k]) / total;
            const bool capped = per_kind[k] >= original[k] * cfg.max_dup_factor;
            CHECK((frac >= cfg.min_class_frac - 1e-12 || capped));
        }
    }
}

TEST_CASE("rebalance is deterministic in the seed") {
    std::vector<SftSample> samples;
    for (int i = 0; i < 50; ++i)
        samples.push_back(nav_sample(ActionKind::Forward, 0.25, i));
    for (int i = 0; i < 3; ++i)
        samples.push_back(nav_sample(ActionKind::Stop, 0, 50 + i));

    const RebalanceConfig cfg{.min_class_frac = 0.2, .max_dup_factor = 5,
                              .seed = 123};
    const auto a = rebalance(samples, cfg);
    const auto b = rebalance(samples, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].step_index == b[i].step_index);
}

TEST_CASE("emit_sft produces one nav sample per merged step plus a summary") {
    const Scene scene = small_room();
    // non-mergeable decisions: 4 nav samples + 1 summary
    ScriptedAgent agent({"turn left 15 degrees", "move forward 25 cm",
                         "turn right 15 degrees", "stop"});
    const EpisodeRecord record = run_episode(scene, agent, EpisodeConfig{}, 5);
    REQUIRE(record.decisions.size() == 4);
    write_episodes_jsonl({record}, "datagen_episodes.jsonl");

    DatagenConfig cfg;
    cfg.apply_rebalance = false;
    const EmitStats stats =
        emit_sft("datagen_episodes.jsonl", "datagen_sft.jsonl", cfg);
    CHECK(stats.episodes == 1);
    CHECK(stats.nav_samples == 4);
    CHECK(stats.summarize_samples == 1);
    CHECK(stats.emitted == 5);

    // every nav label parses; frame refs end with the current frame
    std::ifstream in("datagen_sft.jsonl");
    std::string line;
    int navs = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("schema_version") == 1);
        if (j.at("task") == "nav") {
            ++navs;
            CHECK_NOTHROW(parse_action(j.at("label").get<std::string>()));
            const auto refs = j.at("frame_refs").get<std::vector<std::string>>();
            REQUIRE(!refs.empty());
        }
    }
    CHECK(navs == 4);
}

TEST_CASE("emit_sft merges consecutive forwards in the labels") {
    const Scene scene = small_room();
    ScriptedAgent agent({"move forward 25 cm", "move forward 25 cm", "stop"});
    const EpisodeRecord record = run_episode(scene, agent, EpisodeConfig{}, 6);
    write_episodes_jsonl({record}, "datagen_merge.jsonl");

    DatagenConfig cfg;
    cfg.apply_rebalance = false;
    const EmitStats stats = emit_sft("datagen_merge.jsonl", "datagen_merge_out.jsonl", cfg);
    CHECK(stats.nav_samples == 2);  // merged forward + stop

    std::ifstream in("datagen_merge_out.jsonl");
    std::string line;
    bool found_half_meter = false;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        if (j.at("task") == "nav" && j.at("label") == "move forward 50 cm")
            found_half_meter = true;
    }
    CHECK(found_half_meter);
}

TEST_CASE("emit_sft is byte-deterministic and skips malformed lines") {
    const Scene scene = small_room();
    OracleAgent oracle(scene);
    const EpisodeRecord a = run_episode(scene, oracle, EpisodeConfig{}, 7);
    const EpisodeRecord b = run_episode(scene, oracle, EpisodeConfig{}, 8);
    write_episodes_jsonl({a, b}, "datagen_det.jsonl");

    // append a malformed line
    {
        std::ofstream out("datagen_det.jsonl", std::ios::app);
        out << "{not json}\n";
    }

    DatagenConfig cfg;
    cfg.rebalance.seed = 3;
    const EmitStats s1 = emit_sft("datagen_det.jsonl", "datagen_det_a.jsonl", cfg);
    const EmitStats s2 = emit_sft("datagen_det.jsonl", "datagen_det_b.jsonl", cfg);
    CHECK(s1.skipped_lines == 1);
    CHECK(s2.skipped_lines == 1);
    CHECK(s1.emitted == s2.emitted);
    CHECK(slurp("datagen_det_a.jsonl") == slurp("datagen_det_b.jsonl"));
    CHECK(s1.emitted > 0);
}
