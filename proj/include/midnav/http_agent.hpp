#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "midnav/episode.hpp"
#include "midnav/scene.hpp"

namespace midnav {

struct HttpAgentConfig {
    std::string endpoint;  // http://host:port/path
    double timeout_s = 30.0;
    int retries = 2;  // additional attempts after the first
};

// POSTs a chat-completion-style request {messages:[{role:"user", content:
// [text, images...]}], metadata:{...}} and returns the completion text
// verbatim. Images are inlined as base64 data URLs when the files are
// readable, otherwise passed as file:// URLs. Throws Timeout, TransportError
// or BadResponse after the configured retries.
std::string external_agent_query(const HttpAgentConfig& cfg,
                                 const std::string& prompt,
                                 const std::vector<std::string>& frame_paths,
                                 const std::string& metadata_json = "");

// Agent that forwards observations to a served VLA endpoint.
class ExternalAgent : public AgentInterface {
  public:
    explicit ExternalAgent(HttpAgentConfig cfg) : cfg_(std::move(cfg)) {}
    std::string decide(const ObservationBundle& obs) override;
    std::string name() const override { return "external"; }

  private:
    HttpAgentConfig cfg_;
};

// In-process HTTP test double for a served VLA. Scripted mode replays a fixed
// response list (repeating the last entry when exhausted); oracle mode runs
// the shortest-path follower on the pose metadata found in each request.
class MockAgentServer {
  public:
    struct Options {
        int port = 0;  // 0 picks a free port
        std::vector<std::string> script;
        std::vector<Scene> oracle_scenes;  // matched by scene_id
        OracleParams oracle;
        double robot_radius = kDefaultRobotRadius;
        double planning_margin = 0.05;
    };

    explicit MockAgentServer(Options options);
    ~MockAgentServer();

    MockAgentServer(const MockAgentServer&) = delete;
    MockAgentServer& operator=(const MockAgentServer&) = delete;

    // Binds and serves on a background thread. Throws PortInUse.
    void start();
    void stop();

    int port() const;
    std::string endpoint() const;  // http://127.0.0.1:{port}/v1/chat/completions

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace midnav
