#pragma once

#include <string>
#include <utility>

#include <httplib.h>

#include "roadlaw/pipeline.hpp"
#include "roadlaw/util.hpp"

namespace roadlaw {

/// JSON-over-HTTP front end for one Engine.
///
/// POST /v1/judge   {"accident_text": str, "video_description"?: str,
///                   "case_id"?: str}
///   -> 200 {"case_id", "final_mode", "statute_ids", "report", "trace_id"}
///   -> 400 on malformed requests, 502 when a backend or the structured
///      output protocol failed, 500 otherwise.
/// GET  /v1/health  -> 200 {"status": "ok"}
///
/// The trace id is derived from the request body, so identical requests map
/// to identical ids.
class JudgeService {
public:
    explicit JudgeService(const Engine& engine, int max_threads = 4)
        : engine_(engine) {
        server_.new_task_queue = [max_threads] {
            return new httplib::ThreadPool(
                static_cast<std::size_t>(max_threads));
        };
        server_.Get("/v1/health",
                    [](const httplib::Request&, httplib::Response& res) {
                        res.set_content(Json{{"status", "ok"}}.dump(),
                                        "application/json");
                    });
        server_.Post("/v1/judge", [this](const httplib::Request& req,
                                         httplib::Response& res) {
            const auto [status, body] = handle_judge(req.body);
            res.status = status;
            res.set_content(body.dump(), "application/json");
        });
    }

    /// Request handling without the socket layer; the HTTP routes call this.
    std::pair<int, Json> handle_judge(const std::string& body) const {
        const std::string trace_id = "req-" + content_digest(body);
        const Json req = Json::parse(body, nullptr, /*allow_exceptions=*/false);
        if (req.is_discarded() || !req.is_object()) {
            return {400, Json{{"error", "request body must be a JSON object"},
                              {"trace_id", trace_id}}};
        }
        if (!req.contains("accident_text") ||
            !req["accident_text"].is_string() ||
            req["accident_text"].get<std::string>().empty()) {
            return {400,
                    Json{{"error",
                          "missing non-empty string field 'accident_text'"},
                         {"trace_id", trace_id}}};
        }
        if (req.contains("video_description") &&
            !req["video_description"].is_string()) {
            return {400, Json{{"error",
                               "'video_description' must be a string"},
                              {"trace_id", trace_id}}};
        }
        if (req.contains("case_id") && !req["case_id"].is_string()) {
            return {400, Json{{"error", "'case_id' must be a string"},
                              {"trace_id", trace_id}}};
        }
        const std::string case_id = req.value("case_id", trace_id);
        try {
            const JudgmentReport result =
                engine_.run_case(case_id, req["accident_text"],
                                 req.value("video_description", ""));
            return {200, Json{{"case_id", case_id},
                              {"final_mode", result.judgment.final_mode},
                              {"statute_ids",
                               result.judgment.final_statute_ids},
                              {"report", result.rendered},
                              {"trace_id", trace_id}}};
        } catch (const PipelineError& e) {
            const int status =
                e.kind == PipelineError::Kind::other ? 500 : 502;
            return {status, Json{{"error", e.what()},
                                 {"stage", e.stage},
                                 {"trace_id", trace_id}}};
        }
    }

    /// Blocking serve loop on a fixed port.
    bool listen(const std::string& host, int port) {
        return server_.listen(host, port);
    }

    /// Binds to a free port and returns it; follow with serve_after_bind().
    int bind_any_port(const std::string& host) {
        return server_.bind_to_any_port(host);
    }

    /// Blocking serve loop after bind_any_port().
    bool serve_after_bind() { return server_.listen_after_bind(); }

    bool is_running() const { return server_.is_running(); }

    void stop() { server_.stop(); }

private:
    const Engine& engine_;
    httplib::Server server_;
};

}  // namespace roadlaw
