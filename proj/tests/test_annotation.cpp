#include <doctest.h>

#include "ehn/annotation.hpp"
#include "helpers.hpp"

using namespace ehn;
using testing::fixture;
using testing::TempDir;

namespace {

struct ToyTasks {
    Lexicon lex = load_lexicon(fixture("toy/lexicon.tsv"));
    Taxonomy tax = load_taxonomy(fixture("toy/taxonomy.tsv"));
    FrequencyTable freq = load_frequency(fixture("toy/freq.tsv"));
    ExtractionResult result = extract_analogies(lex, tax, freq, ExtractionConfig{});
    std::vector<AnnotationTask> tasks = build_tasks(lex, freq, result.concept_analogies, ExtractionConfig{});
};

std::vector<AnnotationTask> synset_tasks(int n) {
    std::vector<AnnotationTask> out;
    for (int i = 0; i < n; ++i)
        out.push_back(make_synset_task(ConceptId("c" + std::to_string(i), "概"), {"甲", "乙"}));
    return out;
}

Verdict word_verdict(const std::string& task, const std::string& who, WordDecision d) {
    Verdict v;
    v.task_id = task;
    v.annotator = who;
    v.words["甲"] = d;
    v.timestamp = "2026-01-01T00:00:00Z";
    return v;
}

Verdict decision(const std::string& task, const std::string& who, Decision d) {
    Verdict v;
    v.task_id = task;
    v.annotator = who;
    v.decision = d;
    v.timestamp = "2026-01-01T00:00:00Z";
    return v;
}

}  // namespace

TEST_SUITE("annotation") {

TEST_CASE("tasks are built from extraction output") {
    const ToyTasks t;
    REQUIRE(t.tasks.size() == 3);  // one concept analogy, synsets of horse and wood
    const auto& ca = t.tasks[0];
    CHECK(ca.kind == TaskKind::ConceptAnalogy);
    CHECK(ca.left_graph.node(ca.left_node).id == ConceptId::parse("wood|木"));
    CHECK(ca.right_graph.node(ca.right_node).id == ConceptId::parse("馬|horse"));
    CHECK(t.tasks[1].kind == TaskKind::Synset);
    CHECK(t.tasks[1].candidates == std::vector<std::string>{"山馬", "馬", "馬匹", "駙"});
    CHECK(t.tasks[2].candidates == std::vector<std::string>{"木頭"});
    CHECK(ca.id.size() == 16);
    // ids depend on content only
    const ToyTasks again;
    for (std::size_t i = 0; i < t.tasks.size(); ++i) CHECK(again.tasks[i].id == t.tasks[i].id);
    CHECK(t.tasks[1].id != t.tasks[2].id);
}

TEST_CASE("task JSON round-trips, highlights included") {
    const ToyTasks t;
    for (const auto& task : t.tasks) {
        const auto j = task_to_json(task);
        const auto back = task_from_json(j);
        CHECK(task_to_json(back) == j);
    }
    const auto j = task_to_json(t.tasks[0]);
    CHECK(j["left"]["graph"]["nodes"].size() == 2);
    CHECK(j["left"]["graph"]["edges"][0]["label"] == "qualification");
    CHECK(j["left"]["highlight"] == 0);
}

TEST_CASE("sessions give each annotator a full seeded queue") {
    const auto s = Session::create(synset_tasks(3), {"ann1", "ann2"}, 42);
    CHECK(s.queue("ann1").size() == 3);
    CHECK(s.queue("ann2").size() == 3);
    const auto again = Session::create(synset_tasks(3), {"ann1", "ann2"}, 42);
    CHECK(again.queue("ann1") == s.queue("ann1"));
    CHECK(again.queue("ann2") == s.queue("ann2"));
    CHECK_THROWS_AS(s.queue("nobody"), UnknownAnnotator);

    auto dup = synset_tasks(2);
    dup.push_back(dup[0]);
    CHECK_THROWS_AS(Session::create(dup, {"a"}, 1), std::invalid_argument);
    CHECK_THROWS_AS(Session::create({}, {"a"}, 1), std::invalid_argument);
    CHECK_THROWS_AS(Session::create(synset_tasks(1), {"a", "a"}, 1), std::invalid_argument);
}

TEST_CASE("seeded permutation is a permutation and depends on the seed") {
    const auto p = seeded_permutation(50, 7);
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
    CHECK(seeded_permutation(50, 7) == p);
    CHECK(seeded_permutation(50, 8) != p);
    CHECK(seeded_permutation(0, 1).empty());
}

TEST_CASE("verdicts overwrite with an audit entry") {
    const auto tasks = synset_tasks(2);
    auto s = Session::create(tasks, {"ann1", "ann2"}, 1);
    CHECK(!s.submit(word_verdict(tasks[0].id, "ann1", WordDecision::Keep)));
    CHECK(s.verdicts().size() == 1);
    CHECK(s.audit().empty());
    CHECK(s.submit(word_verdict(tasks[0].id, "ann1", WordDecision::Remove)));
    CHECK(s.verdicts().size() == 1);
    REQUIRE(s.audit().size() == 1);
    CHECK(s.audit()[0].previous.words.at("甲") == WordDecision::Keep);
    CHECK(s.verdicts().at({tasks[0].id, "ann1"}).words.at("甲") == WordDecision::Remove);

    CHECK_THROWS_AS(s.submit(word_verdict(tasks[0].id, "nobody", WordDecision::Keep)), UnknownAnnotator);
    CHECK_THROWS_AS(s.submit(word_verdict("0000000000000000", "ann1", WordDecision::Keep)), UnknownTask);
    CHECK_THROWS_AS(s.submit(decision(tasks[0].id, "ann1", Decision::Correct)), BadVerdict);
    auto stranger = word_verdict(tasks[0].id, "ann1", WordDecision::Keep);
    stranger.words["丙"] = WordDecision::Keep;
    CHECK_THROWS_AS(s.submit(stranger), BadVerdict);
}

TEST_CASE("next task walks the queue") {
    const auto tasks = synset_tasks(3);
    auto s = Session::create(tasks, {"ann1"}, 3);
    const auto& q = s.queue("ann1");
    for (std::size_t i = 0; i < 3; ++i) {
        const auto* t = s.next_task("ann1");
        REQUIRE(t);
        CHECK(t->id == q[i]);
        s.submit(word_verdict(t->id, "ann1", WordDecision::Keep));
        CHECK(s.labeled_by("ann1") == i + 1);
    }
    CHECK(s.next_task("ann1") == nullptr);
}

TEST_CASE("session JSON round-trips") {
    const ToyTasks t;
    auto s = Session::create(t.tasks, {"ann1", "ann2"}, 9);
    s.submit(decision(t.tasks[0].id, "ann1", Decision::Correct));
    s.submit(decision(t.tasks[0].id, "ann1", Decision::Incorrect));
    auto w = word_verdict(t.tasks[1].id, "ann2", WordDecision::Remove);
    w.words = {{"駙", WordDecision::Remove}, {"馬", WordDecision::Keep}};
    s.submit(w);
    const auto back = Session::from_json(nlohmann::json::parse(s.to_json().dump()));
    CHECK(back == s);
    CHECK(back.queue("ann2") == s.queue("ann2"));
    CHECK(back.audit().size() == 1);
}

TEST_CASE("store persists through the log and snapshots") {
    TempDir dir;
    const auto tasks = synset_tasks(4);
    {
        auto store = SessionStore::create(dir.path(), Session::create(tasks, {"ann1", "ann2"}, 5), 3);
        store->submit(word_verdict(tasks[0].id, "ann1", WordDecision::Keep));
        store->submit(word_verdict(tasks[1].id, "ann1", WordDecision::Keep));
        store->submit(word_verdict(tasks[2].id, "ann2", WordDecision::Remove));  // snapshot here
        auto v = word_verdict(tasks[0].id, "ann1", WordDecision::Remove);
        v.timestamp.clear();
        store->submit(v);  // only in the log until flushed
        CHECK(store->read([](const Session& s) { return s.audit().size(); }) == 1);
    }
    const auto log = testing::slurp(SessionStore::log_path(dir.path()));
    CHECK(std::count(log.begin(), log.end(), '\n') == 4);

    auto reopened = SessionStore::open(dir.path());
    reopened->read([&](const Session& s) {
        CHECK(s.verdicts().size() == 3);
        CHECK(s.audit().size() == 1);
        CHECK(!s.verdicts().at({tasks[0].id, "ann1"}).timestamp.empty());
        CHECK(s.verdicts().at({tasks[0].id, "ann1"}).words.at("甲") == WordDecision::Remove);
        return 0;
    });
}

TEST_CASE("log entries after the last snapshot are replayed") {
    TempDir dir, crash;
    const auto tasks = synset_tasks(2);
    Session original = Session::create(tasks, {"ann1"}, 5);
    {
        auto store = SessionStore::create(dir.path(), original, 100);
        store->submit(word_verdict(tasks[0].id, "ann1", WordDecision::Keep));
        store->submit(word_verdict(tasks[0].id, "ann1", WordDecision::Remove));
        // Simulate a crash: copy the files before the destructor flushes.
        std::filesystem::copy(dir.path(), crash.path(), std::filesystem::copy_options::recursive);
    }
    // The snapshot in the copy predates both verdicts; a torn final line is ignored.
    {
        std::ofstream(SessionStore::log_path(crash.path()), std::ios::app) << "{\"seq\":3,\"verd";
    }
    auto store = SessionStore::open(crash.path());
    store->read([&](const Session& s) {
        CHECK(s.verdicts().size() == 1);
        CHECK(s.audit().size() == 1);
        return 0;
    });
    store->submit(word_verdict(tasks[1].id, "ann1", WordDecision::Keep));
    store.reset();
    auto again = SessionStore::open(crash.path());
    CHECK(again->read([](const Session& s) { return s.verdicts().size(); }) == 2);
}

TEST_CASE("export lists one row per verdict") {
    const auto tasks = synset_tasks(2);
    auto s = Session::create(tasks, {"ann1", "ann2"}, 1);
    s.submit(word_verdict(tasks[1].id, "ann2", WordDecision::Remove));
    s.submit(word_verdict(tasks[0].id, "ann1", WordDecision::Keep));
    const auto tsv = export_verdicts_tsv(s);
    std::string first = tasks[0].id < tasks[1].id ? tasks[0].id + "\tann1\t甲=keep\n" : tasks[1].id + "\tann2\t甲=remove\n";
    CHECK(tsv.find("task_id\tannotator\tdecision\n" + first) == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 3);
}

TEST_CASE("agreement covers fully labeled concept analogy tasks") {
    std::vector<AnnotationTask> tasks;
    for (int i = 0; i < 3; ++i) {
        AnnotationTask t;
        t.kind = TaskKind::ConceptAnalogy;
        t.id = "t" + std::to_string(i);
        tasks.push_back(t);
    }
    auto s = Session::create(tasks, {"a", "b"}, 1);
    CHECK(!agreement(s).kappa);
    s.submit(decision("t0", "a", Decision::Correct));
    s.submit(decision("t0", "b", Decision::Correct));
    s.submit(decision("t1", "a", Decision::Correct));
    s.submit(decision("t1", "b", Decision::Incorrect));
    s.submit(decision("t2", "a", Decision::Incorrect));  // b has not labeled t2
    const auto r = agreement(s);
    CHECK(r.n_items == 2);
    CHECK(r.n_annotators == 2);
    REQUIRE(r.kappa);
    CHECK(std::abs(*r.kappa - (-1.0 / 3.0)) < 1e-12);
    const auto j = r.to_json();
    CHECK(j["n_items"] == 2);
    CHECK(j["annotators"].size() == 2);
}

TEST_CASE("verdict policy") {
    const ConceptAnalogy ca{SenseConcept{"良材", 2, ConceptId::parse("wood|木")},
                            SenseConcept{"駿馬", 1, ConceptId::parse("馬|horse")}};
    VerdictBook book;
    const VerdictPolicy permissive, strict{UnlabeledPolicy::Strict};
    CHECK(keep_analogy(book, ca, permissive));
    CHECK(!keep_analogy(book, ca, strict));
    book.analogies[ca.key()] = {Decision::Correct, Decision::Correct, Decision::Incorrect};
    CHECK(keep_analogy(book, ca, strict));
    book.analogies[ca.key()] = {Decision::Correct, Decision::Incorrect};
    CHECK(!keep_analogy(book, ca, permissive));
    book.analogies[ca.key()] = {Decision::Incorrect};
    CHECK(!keep_analogy(book, ca, permissive));
}

TEST_CASE("synset pruning drops every removed word") {
    const auto flower = ConceptId::parse("FlowerGrass|花草");
    const std::map<ConceptId, std::vector<std::string>> synsets{{flower, {"山茶花", "花草", "薰衣草", "鳶尾花"}}};
    const auto task = make_synset_task(flower, synsets.at(flower));
    auto s = Session::create({task}, {"a", "b"}, 1);
    Verdict va;
    va.task_id = task.id;
    va.annotator = "a";
    va.words = {{"山茶花", WordDecision::Remove}, {"薰衣草", WordDecision::Remove}, {"花草", WordDecision::Keep}};
    s.submit(va);
    Verdict vb = va;
    vb.annotator = "b";
    vb.words = {{"鳶尾花", WordDecision::Remove}};
    s.submit(vb);
    const auto book = collect_verdicts(s);
    const auto once = apply_verdicts({}, synsets, book);
    CHECK(once.synsets.at(flower) == std::vector<std::string>{"花草"});
    const auto twice = apply_verdicts(once.concept_analogies, once.synsets, book);
    CHECK(twice.synsets == once.synsets);

    const auto filter = make_verdict_filter(book);
    CHECK(filter.keep_word(flower, "花草"));
    CHECK(!filter.keep_word(flower, "鳶尾花"));
}

TEST_CASE("verdicts feed back into extraction") {
    const ToyTasks t;
    auto s = Session::create(t.tasks, {"a", "b", "c"}, 1);
    for (const char* who : {"a", "b"}) s.submit(decision(t.tasks[0].id, who, Decision::Correct));
    s.submit(decision(t.tasks[0].id, "c", Decision::Incorrect));
    Verdict prune;
    prune.task_id = t.tasks[1].id;
    prune.annotator = "a";
    prune.words = {{"駙", WordDecision::Remove}};
    s.submit(prune);
    const auto book = collect_verdicts(s);
    const auto filter = make_verdict_filter(book, VerdictPolicy{UnlabeledPolicy::Strict});
    const auto r = extract_analogies(t.lex, t.tax, t.freq, ExtractionConfig{}, &filter);
    REQUIRE(r.analogies.size() == 1);
    CHECK(r.analogies[0].synset == std::vector<std::string>{"山馬", "馬", "馬匹"});

    s.submit(decision(t.tasks[0].id, "b", Decision::Incorrect));
    const auto book2 = collect_verdicts(s);
    const auto filter2 = make_verdict_filter(book2);
    CHECK(extract_analogies(t.lex, t.tax, t.freq, ExtractionConfig{}, &filter2).analogies.empty());
}

}  // TEST_SUITE
