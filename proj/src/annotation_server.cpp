#include "ehn/annotation_server.hpp"

#include <httplib.h>

namespace ehn {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, json{{"error", message}}, status);
}

}  // namespace

json session_summary(const Session& s) {
    std::size_t ca = 0;
    for (const auto& t : s.tasks()) ca += t.kind == TaskKind::ConceptAnalogy;
    json annotators = json::array();
    for (const auto& a : s.annotators()) {
        const auto done = s.labeled_by(a);
        annotators.push_back({{"id", a}, {"labeled", done}, {"remaining", s.queue(a).size() - done}});
    }
    return json{{"tasks", s.tasks().size()},
                {"concept_analogy_tasks", ca},
                {"synset_tasks", s.tasks().size() - ca},
                {"verdicts", s.verdicts().size()},
                {"overwrites", s.audit().size()},
                {"annotators", std::move(annotators)}};
}

AnnotationServer::AnnotationServer(SessionStore& store, ServerOptions opts)
    : store_(store), opts_(std::move(opts)), server_(std::make_unique<httplib::Server>()) {
    auto& svr = *server_;
    // SO_REUSEADDR only: a second server on the same port must fail to bind.
    svr.set_socket_options([](int sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });

    svr.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, store_.read([](const Session& s) { return session_summary(s); }));
    });

    svr.Get("/api/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("annotator")) return send_error(res, 400, "missing annotator parameter");
        const auto annotator = req.get_param_value("annotator");
        store_.read([&](const Session& s) {
            if (!s.has_annotator(annotator)) return send_error(res, 404, "unknown annotator " + annotator);
            const auto done = s.labeled_by(annotator);
            json body{{"annotator", annotator}, {"labeled", done}, {"remaining", s.queue(annotator).size() - done}};
            const auto* t = s.next_task(annotator);
            body["task"] = t ? task_to_json(*t) : json(nullptr);
            send_json(res, body);
        });
    });

    svr.Post(R"(/api/tasks/([^/]+)/verdict)", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception& e) {
            return send_error(res, 400, std::string("invalid JSON: ") + e.what());
        }
        try {
            auto v = verdict_from_json(body);
            const std::string id = req.matches[1];
            if (!v.task_id.empty() && v.task_id != id) return send_error(res, 400, "task_id does not match the URL");
            v.task_id = id;
            const bool overwritten = store_.submit(std::move(v));
            send_json(res, json{{"ok", true}, {"task_id", id}, {"overwritten", overwritten}});
        } catch (const UnknownTask& e) {
            send_error(res, 404, e.what());
        } catch (const UnknownAnnotator& e) {
            send_error(res, 404, e.what());
        } catch (const BadVerdict& e) {
            send_error(res, 400, e.what());
        }
    });

    svr.Get("/api/agreement", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, store_.read([](const Session& s) { return agreement(s).to_json(); }));
    });

    svr.Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(store_.read([](const Session& s) { return export_verdicts_tsv(s); }),
                        "text/tab-separated-values; charset=utf-8");
    });

    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        } catch (...) {
            send_error(res, 500, "internal error");
        }
    });

    if (opts_.static_dir) svr.set_mount_point("/", opts_.static_dir->string());
}

AnnotationServer::~AnnotationServer() = default;

bool AnnotationServer::bind() {
    if (opts_.port == 0) {
        port_ = server_->bind_to_any_port(opts_.host);
        return port_ > 0;
    }
    if (!server_->bind_to_port(opts_.host, opts_.port)) return false;
    port_ = opts_.port;
    return true;
}

void AnnotationServer::run() {
    {
        std::lock_guard lock(state_mutex_);
        if (stop_requested_) return;
        started_ = true;
    }
    server_->listen_after_bind();
}

void AnnotationServer::stop() {
    {
        std::lock_guard lock(state_mutex_);
        stop_requested_ = true;
        if (!started_) return;
    }
    server_->wait_until_ready();
    server_->stop();
}

}  // namespace ehn
