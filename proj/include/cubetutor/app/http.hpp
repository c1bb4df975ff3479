#pragma once

// JSON-over-HTTP front end for SessionManager and the analysis pipeline.

// Eigen comes first: <resolv.h>, pulled in by httplib, defines a `_res` macro
// that collides with Eigen parameter names.
#include "cubetutor/analytics/pipeline.hpp"
#include "cubetutor/app/session.hpp"

#include <httplib.h>

#include <json.hpp>
#include <string>

namespace cubetutor::app {

using nlohmann::json;

inline int http_status(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotFound: return 404;
        case ErrorKind::InvalidArgument:
        case ErrorKind::Validation: return 400;
        case ErrorKind::Conflict: return 409;
        case ErrorKind::Io: return 500;
    }
    return 500;
}

inline json to_json(const TaskSpec& t) {
    return {{"kind", to_string(t.kind)}, {"id", t.id},           {"title", t.title},
            {"start_state", t.start.to_string()}, {"goal", t.goal.to_string()}, {"max_moves", t.max_moves}};
}

inline json to_json(const Snapshot& s) {
    json j = {{"id", s.id},
              {"student_id", s.student_id},
              {"state", s.state.to_string()},
              {"initial_state", s.initial_state.to_string()},
              {"active_task", nullptr},
              {"goal_reached", s.goal_reached},
              {"ended", s.ended},
              {"event_count", s.event_count},
              {"walkthrough_cursor", nullptr}};
    if (s.active_task) j["active_task"] = to_json(*s.active_task);
    if (s.walkthrough_cursor) j["walkthrough_cursor"] = *s.walkthrough_cursor;
    return j;
}

inline json to_json(const WalkthroughStep& st) {
    json j = {{"index", st.index},
              {"move", to_string(st.move)},
              {"explanation", st.explanation},
              {"pre_state", st.pre_state.to_string()},
              {"post_state", st.post_state.to_string()},
              {"subgoal_id", nullptr}};
    if (st.subgoal_id) j["subgoal_id"] = *st.subgoal_id;
    return j;
}

inline json to_json(const Hint& h) {
    json j = {{"goal_reached", h.goal_reached}, {"move", nullptr}, {"text", h.text}};
    if (h.move) j["move"] = to_string(*h.move);
    return j;
}

inline Action parse_action(const json& body) {
    if (!body.is_object() || !body.contains("type") || !body["type"].is_string())
        throw invalid_argument("action needs a string 'type'");
    const std::string type = body["type"];
    Action a;
    if (type == "move") {
        if (!body.contains("move") || !body["move"].is_string()) throw invalid_argument("move action needs 'move'");
        a.kind = Action::Kind::Move;
        a.move = body["move"];
    } else if (type == "reset") {
        a.kind = Action::Kind::Reset;
    } else if (type == "start_task") {
        if (!body.contains("task_kind") || !body["task_kind"].is_string() || !body.contains("task_id") ||
            !body["task_id"].is_number_integer())
            throw invalid_argument("start_task needs 'task_kind' and integer 'task_id'");
        try {
            a.task_kind = parse_task_kind(body["task_kind"].get<std::string>());
        } catch (const Error& e) {
            throw invalid_argument(e.what());
        }
        a.kind = Action::Kind::StartTask;
        a.task_id = body["task_id"];
    } else if (type == "complete_task") {
        a.kind = Action::Kind::CompleteTask;
    } else if (type == "hint") {
        a.kind = Action::Kind::Hint;
    } else if (type == "walkthrough_forward") {
        a.kind = Action::Kind::WalkthroughForward;
    } else if (type == "walkthrough_rewind") {
        a.kind = Action::Kind::WalkthroughRewind;
    } else if (type == "end") {
        a.kind = Action::Kind::End;
    } else {
        throw invalid_argument("unknown action type '" + type + "'");
    }
    return a;
}

class HttpService {
public:
    explicit HttpService(SessionManager& sessions) : sessions_(sessions) { routes(); }

    httplib::Server& server() { return server_; }

    /// Binds to an ephemeral port on `host` and returns it (-1 on failure).
    int bind_any(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }

private:
    template <typename F>
    auto guarded(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const Error& e) {
                res.status = http_status(e.kind());
                res.set_content(json{{"error", e.what()}}.dump(), "application/json");
            } catch (const json::exception& e) {
                res.status = 400;
                res.set_content(json{{"error", std::string("malformed JSON: ") + e.what()}}.dump(), "application/json");
            }
        };
    }

    static json body_of(const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        return json::parse(req.body);
    }

    static void reply(httplib::Response& res, const json& j, int status = 200) {
        res.status = status;
        res.set_content(j.dump(), "application/json");
    }

    void routes() {
        server_.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json body = body_of(req);
            if (!body.contains("student_id") || !body["student_id"].is_string())
                throw invalid_argument("body needs a string 'student_id'");
            const std::string id = sessions_.create_session(body["student_id"]);
            reply(res, to_json(sessions_.snapshot(id)), 201);
        }));
        server_.Get(R"(/sessions/([A-Za-z0-9_.-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            reply(res, to_json(sessions_.snapshot(req.matches[1])));
        }));
        server_.Post(R"(/sessions/([A-Za-z0-9_.-]+)/actions)",
                     guarded([this](const httplib::Request& req, httplib::Response& res) {
                         const std::string id = req.matches[1];
                         sessions_.snapshot(id);  // unknown sessions are 404 before the body is judged
                         const ActionResult r = sessions_.act(id, parse_action(body_of(req)));
                         json j = {{"snapshot", to_json(r.snapshot)}, {"event", format_event(r.event)}};
                         if (r.hint) j["hint"] = to_json(*r.hint);
                         if (r.step) j["step"] = to_json(*r.step);
                         reply(res, j);
                     }));
        server_.Get(R"(/sessions/([A-Za-z0-9_.-]+)/mirror)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const MirrorView m = sessions_.mirror(req.matches[1]);
            reply(res, {{"faces", {{"D", m.down}, {"B", m.back}, {"L", m.left}}}, {"facelet_count", m.size()}});
        }));
        server_.Get(R"(/sessions/([A-Za-z0-9_.-]+)/walkthrough)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Walkthrough w = sessions_.walkthrough(req.matches[1]);
                        json steps = json::array();
                        for (const auto& st : w.steps()) steps.push_back(to_json(st));
                        reply(res, {{"cursor", w.cursor()},
                                    {"start_state", w.start_state().to_string()},
                                    {"current_state", w.current_state().to_string()},
                                    {"steps", steps}});
                    }));
        server_.Get("/scenarios", guarded([this](const httplib::Request&, httplib::Response& res) {
            json practice = json::array(), challenges = json::array();
            for (const auto& t : sessions_.tasks().practice()) practice.push_back(to_json(t));
            for (const auto& t : sessions_.tasks().challenges()) challenges.push_back(to_json(t));
            reply(res, {{"practice", practice}, {"challenges", challenges}});
        }));
        server_.Get(R"(/logs/([A-Za-z0-9_.-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto events = sessions_.student_log(req.matches[1]);
            if (events.empty()) throw Error(ErrorKind::NotFound, "no events for student " + std::string(req.matches[1]));
            res.set_content(format_log(events), "text/tab-separated-values");
        }));
        server_.Post("/analytics/run", guarded([this](const httplib::Request& req, httplib::Response& res) {
            run_analytics(body_of(req), res);
        }));
    }

    /// Body: scores (CSV text, required), log (text; default: every session
    /// held by this server), seed, draws, restarts, kmax.
    void run_analytics(const json& body, httplib::Response& res) {
        if (!body.contains("scores") || !body["scores"].is_string()) throw invalid_argument("body needs 'scores' CSV text");
        const std::vector<SessionEvent> events =
            body.contains("log") ? parse_log(body["log"].get<std::string>()) : sessions_.all_events();
        if (events.empty()) throw Error(ErrorKind::Validation, "log is empty");
        if (const auto v = validate_log(events); !v.empty()) {
            json list = json::array();
            for (const auto& x : v) list.push_back({{"index", x.index}, {"message", x.message}});
            reply(res, {{"error", "log failed validation"}, {"violations", list}}, 400);
            return;
        }
        analytics::PipelineOptions opt;
        opt.seed = body.value("seed", opt.seed);
        opt.draws = body.value("draws", opt.draws);
        opt.restarts = body.value("restarts", opt.restarts);
        opt.kmax = body.value("kmax", opt.kmax);
        const auto result = analytics::run_pipeline(events, analytics::parse_scores_csv(body["scores"]), opt);
        json reports = json::object();
        for (const auto& [name, text] : analytics::render_reports(result)) reports[name] = text;
        reply(res, {{"k", result.k}, {"clusters", result.cluster_names}, {"reports", reports}});
    }

    SessionManager& sessions_;
    httplib::Server server_;
};

}  // namespace cubetutor::app
