#include "midnav/http_agent.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "midnav/datagen.hpp"
#include "midnav/error.hpp"
#include "midnav/jsonio.hpp"

namespace midnav {

namespace {

using nlohmann::json;

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_http_url(const std::string& url) {
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0)
        raise(ErrorCode::TransportError,
              "only http:// endpoints are supported: " + url);
    ParsedUrl out;
    const std::string rest = url.substr(prefix.size());
    const auto slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest
                                                       : rest.substr(0, slash);
    if (slash != std::string::npos) out.path = rest.substr(slash);
    const auto colon = authority.find(':');
    if (colon == std::string::npos) {
        out.host = authority;
    } else {
        out.host = authority.substr(0, colon);
        out.port = std::stoi(authority.substr(colon + 1));
    }
    if (out.host.empty())
        raise(ErrorCode::TransportError, "endpoint missing host: " + url);
    return out;
}

std::string base64_encode(const std::string& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const uint32_t n = (uint8_t(bytes[i]) << 16) | (uint8_t(bytes[i + 1]) << 8) |
                           uint8_t(bytes[i + 2]);
        out.push_back(alphabet[(n >> 18) & 63]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out.push_back(alphabet[(n >> 6) & 63]);
        out.push_back(alphabet[n & 63]);
        i += 3;
    }
    const std::size_t remain = bytes.size() - i;
    if (remain == 1) {
        const uint32_t n = uint8_t(bytes[i]) << 16;
        out.push_back(alphabet[(n >> 18) & 63]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out += "==";
    } else if (remain == 2) {
        const uint32_t n = (uint8_t(bytes[i]) << 16) | (uint8_t(bytes[i + 1]) << 8);
        out.push_back(alphabet[(n >> 18) & 63]);
        out.push_back(alphabet[(n >> 12) & 63]);
        out.push_back(alphabet[(n >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

json image_entry(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (in) {
        std::ostringstream bytes;
        bytes << in.rdbuf();
        return {{"type", "image_url"},
                {"image_url",
                 {{"url", "data:image/x-portable-graymap;base64," +
                              base64_encode(bytes.str())}}}};
    }
    return {{"type", "image_url"}, {"image_url", {{"url", "file://" + path}}}};
}

bool is_timeout(httplib::Error err) {
    return err == httplib::Error::ConnectionTimeout ||
           err == httplib::Error::Read || err == httplib::Error::Write;
}

}  // namespace

std::string external_agent_query(const HttpAgentConfig& cfg,
                                 const std::string& prompt,
                                 const std::vector<std::string>& frame_paths,
                                 const std::string& metadata_json) {
    const ParsedUrl url = parse_http_url(cfg.endpoint);

    json content = json::array();
    content.push_back({{"type", "text"}, {"text", prompt}});
    for (const std::string& path : frame_paths)
        content.push_back(image_entry(path));
    json body = {{"model", "midnav-agent"},
                 {"messages",
                  json::array({{{"role", "user"}, {"content", content}}})}};
    if (!metadata_json.empty()) body["metadata"] = json::parse(metadata_json);
    const std::string payload = body.dump();

    std::string last_error = "no attempts made";
    ErrorCode last_code = ErrorCode::TransportError;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        httplib::Client client(url.host, url.port);
        const auto seconds = std::chrono::duration<double>(cfg.timeout_s);
        client.set_connection_timeout(
            std::chrono::duration_cast<std::chrono::milliseconds>(seconds));
        client.set_read_timeout(
            std::chrono::duration_cast<std::chrono::milliseconds>(seconds));

        auto result = client.Post(url.path, payload, "application/json");
        if (!result) {
            last_code = is_timeout(result.error()) ? ErrorCode::Timeout
                                                   : ErrorCode::TransportError;
            last_error = httplib::to_string(result.error());
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            last_code = ErrorCode::BadResponse;
            last_error = "status " + std::to_string(result->status);
            continue;
        }
        try {
            const json reply = json::parse(result->body);
            if (reply.contains("choices") && reply["choices"].is_array() &&
                !reply["choices"].empty())
                return reply["choices"][0].at("message").at("content")
                    .get<std::string>();
            if (reply.contains("completion"))
                return reply["completion"].get<std::string>();
            last_code = ErrorCode::BadResponse;
            last_error = "response missing completion field";
        } catch (const json::exception& e) {
            last_code = ErrorCode::BadResponse;
            last_error = std::string("unparseable response: ") + e.what();
        }
    }
    raise(last_code, "agent endpoint " + cfg.endpoint + " failed: " + last_error);
}

std::string ExternalAgent::decide(const ObservationBundle& obs) {
    const std::string prompt = build_nav_prompt(
        obs.instruction, static_cast<int>(obs.history_refs.size()));
    std::vector<std::string> frames = obs.history_refs;
    frames.push_back(obs.current_ref);

    json metadata = {{"scene_id", obs.scene_id},
                     {"decision_index", obs.decision_index},
                     {"pose",
                      {{"x", obs.pose.x},
                       {"y", obs.pose.y},
                       {"yaw", obs.pose.yaw}}}};
    return external_agent_query(cfg_, prompt, frames, metadata.dump());
}

struct MockAgentServer::Impl {
    Options options;
    httplib::Server server;
    std::thread worker;
    std::atomic<std::size_t> cursor{0};
    std::map<std::string, TraversabilityGrid> grids;
    std::map<std::string, Vec2> goals;
    int bound_port = 0;

    explicit Impl(Options opts) : options(std::move(opts)) {
        for (const Scene& scene : options.oracle_scenes) {
            grids.emplace(scene.scene_id,
                          inflate(scene,
                                  options.robot_radius + options.planning_margin));
            goals.emplace(scene.scene_id, scene.goal);
        }
        // default options include SO_REUSEPORT, which would let two servers
        // share one port; keep only address reuse so clashes are detected
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                       reinterpret_cast<const void*>(&yes), sizeof(yes));
        });
        server.Post("/v1/chat/completions",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        handle(req, res);
                    });
    }

    void handle(const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            res.status = 400;
            res.set_content(
                json{{"error", {{"message", std::string("bad JSON: ") + e.what()}}}}
                    .dump(),
                "application/json");
            return;
        }
        if (!body.contains("messages") || !body["messages"].is_array() ||
            body["messages"].empty()) {
            res.status = 400;
            res.set_content(
                json{{"error", {{"message", "missing messages"}}}}.dump(),
                "application/json");
            return;
        }

        std::string text;
        if (!grids.empty()) {
            try {
                const json& meta = body.at("metadata");
                const std::string scene_id = meta.at("scene_id").get<std::string>();
                const json& pose = meta.at("pose");
                const RobotState state{pose.at("x").get<double>(),
                                       pose.at("y").get<double>(),
                                       pose.at("yaw").get<double>(),
                                       0.0, 0.0, 0.0};
                const auto grid = grids.find(scene_id);
                if (grid == grids.end()) {
                    res.status = 400;
                    res.set_content(
                        json{{"error",
                              {{"message", "unknown scene_id: " + scene_id}}}}
                            .dump(),
                        "application/json");
                    return;
                }
                text = format_action(oracle_next_action(
                    grid->second, state, goals.at(scene_id), options.oracle));
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(
                    json{{"error",
                          {{"message",
                            std::string("oracle mode needs pose metadata: ") +
                                e.what()}}}}
                        .dump(),
                    "application/json");
                return;
            }
        } else if (!options.script.empty()) {
            const std::size_t i = cursor.fetch_add(1);
            text = options.script[std::min(i, options.script.size() - 1)];
        } else {
            text = "stop";
        }

        const json reply = {
            {"choices",
             json::array({{{"message",
                            {{"role", "assistant"}, {"content", text}}}}})}};
        res.set_content(reply.dump(), "application/json");
    }
};

MockAgentServer::MockAgentServer(Options options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

MockAgentServer::~MockAgentServer() { stop(); }

void MockAgentServer::start() {
    if (impl_->options.port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port("127.0.0.1");
        if (impl_->bound_port <= 0)
            raise(ErrorCode::PortInUse, "cannot bind a free port");
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", impl_->options.port))
            raise(ErrorCode::PortInUse,
                  "port already in use: " + std::to_string(impl_->options.port));
        impl_->bound_port = impl_->options.port;
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockAgentServer::stop() {
    if (impl_ == nullptr) return;
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int MockAgentServer::port() const { return impl_->bound_port; }

std::string MockAgentServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(impl_->bound_port) +
           "/v1/chat/completions";
}

}  // namespace midnav
