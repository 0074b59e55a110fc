#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ehn/annotation.hpp"

namespace httplib {
class Server;
}

namespace ehn {

struct ServerOptions {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    /// Served under "/" when set.
    std::optional<std::filesystem::path> static_dir;
};

/// JSON API over a SessionStore:
///   GET  /api/session
///   GET  /api/tasks/next?annotator=<id>
///   POST /api/tasks/<id>/verdict
///   GET  /api/agreement
///   GET  /api/export
class AnnotationServer {
public:
    AnnotationServer(SessionStore& store, ServerOptions opts);
    ~AnnotationServer();

    /// False when the address is unavailable (e.g. port in use).
    bool bind();
    int port() const noexcept { return port_; }
    /// Blocks until stop(). bind() must have succeeded.
    void run();
    /// Safe from any thread, before or during run(); run() returns
    /// afterwards, or immediately if it has not started.
    void stop();

private:
    SessionStore& store_;
    ServerOptions opts_;
    std::unique_ptr<httplib::Server> server_;
    int port_ = 0;
    std::mutex state_mutex_;
    bool started_ = false;
    bool stop_requested_ = false;
};

/// Session counts and per-annotator progress, as served at /api/session.
nlohmann::json session_summary(const Session& s);

}  // namespace ehn
