#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "midnav/episode.hpp"
#include "midnav/error.hpp"
#include "midnav/http_agent.hpp"
#include "midnav/metrics.hpp"
#include "support/builders.hpp"

using namespace midnav;
using namespace midnav::testing;

namespace {

Scene small_room() {
    std::vector<std::string> rows(30, std::string(60, '.'));
    for (auto& c : rows.front()) c = '#';
    for (auto& c : rows.back()) c = '#';
    for (auto& row : rows) {
        row.front() = '#';
        row.back() = '#';
    }
    Scene scene = scene_from_ascii(rows, 0.1);
    scene.scene_id = "http-room";
    scene.start_pose = {1.05, 1.55, 0.0};
    scene.goal = {3.05, 1.55};
    for (int k = 0; k <= 8; ++k)
        scene.reference_path.push_back({1.05 + 0.25 * k, 1.55});
    scene.instruction = "go forward to the goal and stop";
    return scene;
}

}  // namespace

TEST_CASE("scripted mock agent returns responses in order") {
    MockAgentServer::Options opts;
    opts.script = {"move forward 50 cm", "stop"};
    MockAgentServer server(std::move(opts));
    server.start();

    HttpAgentConfig cfg{.endpoint = server.endpoint(), .timeout_s = 5.0,
                        .retries = 0};
    CHECK(external_agent_query(cfg, "prompt", {}) == "move forward 50 cm");
    CHECK(external_agent_query(cfg, "prompt", {}) == "stop");
    // exhausted scripts repeat the last reply
    CHECK(external_agent_query(cfg, "prompt", {}) == "stop");
    server.stop();
}

TEST_CASE("malformed request gets a 400 with an error body") {
    MockAgentServer::Options opts;
    opts.script = {"stop"};
    MockAgentServer server(std::move(opts));
    server.start();

    httplib::Client client("127.0.0.1", server.port());
    auto bad_json = client.Post("/v1/chat/completions", "{nope", "application/json");
    REQUIRE(bad_json);
    CHECK(bad_json->status == 400);
    CHECK(bad_json->body.find("error") != std::string::npos);

    auto no_messages = client.Post("/v1/chat/completions", "{}", "application/json");
    REQUIRE(no_messages);
    CHECK(no_messages->status == 400);
    server.stop();
}

TEST_CASE("unreachable endpoint surfaces TransportError after retries") {
    HttpAgentConfig cfg{.endpoint = "http://127.0.0.1:9/v1/chat/completions",
                        .timeout_s = 0.3, .retries = 1};
    try {
        external_agent_query(cfg, "prompt", {});
        FAIL("expected a transport failure");
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::TransportError ||
               e.code() == ErrorCode::Timeout));
    }
}

TEST_CASE("responses without a completion field are BadResponse") {
    httplib::Server raw;
    raw.Post("/v1/chat/completions",
             [](const httplib::Request&, httplib::Response& res) {
                 res.set_content("{}", "application/json");
             });
    const int port = raw.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&raw] { raw.listen_after_bind(); });
    raw.wait_until_ready();

    HttpAgentConfig cfg{
        .endpoint = "http://127.0.0.1:" + std::to_string(port) +
                    "/v1/chat/completions",
        .timeout_s = 5.0,
        .retries = 0};
    try {
        external_agent_query(cfg, "prompt", {});
        FAIL("expected BadResponse");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadResponse);
    }
    raw.stop();
    worker.join();
}

TEST_CASE("busy ports raise PortInUse") {
    MockAgentServer::Options opts;
    opts.script = {"stop"};
    MockAgentServer first(std::move(opts));
    first.start();

    MockAgentServer::Options clash;
    clash.port = first.port();
    clash.script = {"stop"};
    MockAgentServer second(std::move(clash));
    CHECK_THROWS_AS(second.start(), Error);
    first.stop();
}

TEST_CASE("oracle mock agent drives an episode to success over HTTP") {
    const Scene scene = small_room();
    MockAgentServer::Options opts;
    opts.oracle_scenes = {scene};
    MockAgentServer server(std::move(opts));
    server.start();

    ExternalAgent agent({.endpoint = server.endpoint(), .timeout_s = 10.0,
                         .retries = 1});
    EpisodeConfig cfg;
    const EpisodeRecord record = run_episode(scene, agent, cfg, 11);
    server.stop();

    CHECK(record.stop_issued);
    CHECK(record.termination == Termination::Stop);
    const MetricReport report = evaluate_episode(record, scene);
    CHECK(report.sr);
    CHECK(report.ne < 1.0);
}

TEST_CASE("scripted gibberish over HTTP yields AgentError, not a crash") {
    const Scene scene = small_room();
    MockAgentServer::Options opts;
    opts.script = {"I would look around first, maybe"};
    MockAgentServer server(std::move(opts));
    server.start();

    ExternalAgent agent({.endpoint = server.endpoint(), .timeout_s = 5.0,
                         .retries = 0});
    const EpisodeRecord record = run_episode(scene, agent, EpisodeConfig{}, 12);
    server.stop();

    CHECK(record.termination == Termination::AgentError);
    CHECK_FALSE(record.stop_issued);
}

TEST_CASE("frames are attached when the files exist") {
    const Scene scene = small_room();
    MockAgentServer::Options opts;
    opts.oracle_scenes = {scene};
    MockAgentServer server(std::move(opts));
    server.start();

    ExternalAgent agent({.endpoint = server.endpoint(), .timeout_s = 10.0,
                         .retries = 1});
    EpisodeConfig cfg;
    cfg.frames_dir = "http_frames";
    const EpisodeRecord record = run_episode(scene, agent, cfg, 13);
    server.stop();

    CHECK(record.stop_issued);
    REQUIRE(!record.frame_refs.empty());
    std::ifstream frame(record.frame_refs.front(), std::ios::binary);
    CHECK(frame.good());
}
