#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "ehn/annotation_server.hpp"
#include "helpers.hpp"

using namespace ehn;
using nlohmann::json;
using testing::fixture;
using testing::TempDir;

namespace {

std::vector<AnnotationTask> toy_tasks() {
    const auto lex = load_lexicon(fixture("toy/lexicon.tsv"));
    const auto tax = load_taxonomy(fixture("toy/taxonomy.tsv"));
    const auto freq = load_frequency(fixture("toy/freq.tsv"));
    const auto result = extract_analogies(lex, tax, freq, ExtractionConfig{});
    return build_tasks(lex, freq, result.concept_analogies, ExtractionConfig{});
}

/// Server on a free port, running on its own thread for the fixture's life.
struct Running {
    TempDir dir;
    std::unique_ptr<SessionStore> store;
    std::unique_ptr<AnnotationServer> server;
    std::thread thread;
    std::unique_ptr<httplib::Client> client;

    explicit Running(std::optional<std::filesystem::path> static_dir = std::nullopt) {
        store = SessionStore::create(dir / "session", Session::create(toy_tasks(), {"ann1", "ann2"}, 7));
        ServerOptions opts;
        opts.port = 0;
        opts.static_dir = static_dir;
        server = std::make_unique<AnnotationServer>(*store, opts);
        REQUIRE(server->bind());
        thread = std::thread([this] { server->run(); });
        client = std::make_unique<httplib::Client>("127.0.0.1", server->port());
    }
    ~Running() {
        server->stop();
        thread.join();
    }

    json get(const std::string& path, int expect = 200) {
        auto res = client->Get(path);
        REQUIRE(res);
        CHECK(res->status == expect);
        return json::parse(res->body);
    }
    json post(const std::string& path, const std::string& body, int expect = 200) {
        auto res = client->Post(path, body, "application/json");
        REQUIRE(res);
        CHECK(res->status == expect);
        return json::parse(res->body);
    }
};

std::string verdict_body(const std::string& annotator, const std::string& decision) {
    return json{{"annotator", annotator}, {"decision", decision}}.dump();
}

}  // namespace

TEST_SUITE("server") {

TEST_CASE("session summary") {
    Running r;
    const auto s = r.get("/api/session");
    CHECK(s["tasks"] == 3);
    CHECK(s["concept_analogy_tasks"] == 1);
    CHECK(s["synset_tasks"] == 2);
    CHECK(s["verdicts"] == 0);
    CHECK(s["annotators"][0]["id"] == "ann1");
    CHECK(s["annotators"][0]["remaining"] == 3);
}

TEST_CASE("next task follows the annotator's queue") {
    Running r;
    const auto queue = r.store->read([](const Session& s) { return s.queue("ann2"); });
    auto next = r.get("/api/tasks/next?annotator=ann2");
    CHECK(next["annotator"] == "ann2");
    CHECK(next["labeled"] == 0);
    CHECK(next["remaining"] == 3);
    CHECK(next["task"]["id"] == queue[0]);

    r.get("/api/tasks/next", 400);
    r.get("/api/tasks/next?annotator=nobody", 404);
}

TEST_CASE("verdicts are stored, overwritten and exported") {
    Running r;
    const auto ca = r.store->read([](const Session& s) { return s.tasks()[0]; });
    REQUIRE(ca.kind == TaskKind::ConceptAnalogy);
    const std::string url = "/api/tasks/" + ca.id + "/verdict";

    auto res = r.post(url, verdict_body("ann1", "correct"));
    CHECK(res["ok"] == true);
    CHECK(res["overwritten"] == false);
    res = r.post(url, verdict_body("ann1", "incorrect"));
    CHECK(res["overwritten"] == true);
    r.post(url, verdict_body("ann2", "incorrect"));

    const auto s = r.get("/api/session");
    CHECK(s["verdicts"] == 2);
    CHECK(s["overwrites"] == 1);

    auto exported = r.client->Get("/api/export");
    REQUIRE(exported);
    CHECK(exported->status == 200);
    CHECK(exported->get_header_value("Content-Type").find("text/tab-separated-values") == 0);
    CHECK(exported->body == "task_id\tannotator\tdecision\n" + ca.id + "\tann1\tincorrect\n" + ca.id +
                                "\tann2\tincorrect\n");

    const auto a = r.get("/api/agreement");
    CHECK(a["n_items"] == 1);
    CHECK(a["n_annotators"] == 2);
}

TEST_CASE("synset verdicts take per-word decisions") {
    Running r;
    const auto task = r.store->read([](const Session& s) { return s.tasks()[1]; });
    REQUIRE(task.kind == TaskKind::Synset);
    const json body{{"annotator", "ann1"}, {"decision", {{"駙", "remove"}, {"馬", "keep"}}}};
    r.post("/api/tasks/" + task.id + "/verdict", body.dump());
    const auto removed = r.store->read([&](const Session& s) { return collect_verdicts(s).removed; });
    CHECK(removed.at(task.concept_id) == std::set<std::string>{"駙"});
}

TEST_CASE("bad requests are rejected without changing the session") {
    Running r;
    const auto tasks = r.store->read([](const Session& s) { return s.tasks(); });
    const std::string url = "/api/tasks/" + tasks[0].id + "/verdict";
    r.post(url, "{not json", 400);
    r.post(url, json{{"annotator", "ann1"}}.dump(), 400);
    r.post(url, verdict_body("ann1", "maybe"), 400);
    r.post(url, json{{"annotator", "ann1"}, {"decision", "correct"}, {"task_id", tasks[1].id}}.dump(), 400);
    r.post("/api/tasks/" + tasks[2].id + "/verdict", verdict_body("ann1", "correct"), 400);
    r.post(url, verdict_body("nobody", "correct"), 404);
    r.post("/api/tasks/ffffffffffffffff/verdict", verdict_body("ann1", "correct"), 404);
    CHECK(r.get("/api/session")["verdicts"] == 0);
}

TEST_CASE("static files are served when configured") {
    TempDir web;
    ehn::tsv::write_file(web / "index.html", "<html>ok</html>");
    Running r(web.path());
    auto res = r.client->Get("/index.html");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "<html>ok</html>");
}

TEST_CASE("a taken port fails to bind") {
    Running r;
    ServerOptions opts;
    opts.port = r.server->port();
    AnnotationServer second(*r.store, opts);
    CHECK(!second.bind());
}

TEST_CASE("concurrent submissions all land") {
    Running r;
    const auto ca = r.store->read([](const Session& s) { return s.tasks()[0].id; });
    std::vector<std::thread> clients;
    for (int i = 0; i < 8; ++i)
        clients.emplace_back([&, i] {
            httplib::Client c("127.0.0.1", r.server->port());
            for (int k = 0; k < 10; ++k)
                c.Post("/api/tasks/" + ca + "/verdict", verdict_body(i % 2 ? "ann1" : "ann2", "correct"),
                       "application/json");
        });
    for (auto& t : clients) t.join();
    const auto [n, overwrites] =
        r.store->read([](const Session& s) { return std::pair{s.verdicts().size(), s.audit().size()}; });
    CHECK(n == 2);
    CHECK(overwrites == 78);
}

}  // TEST_SUITE
