#include "ehn/annotation.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <random>
#include <stdexcept>

#include "ehn/kappa.hpp"
#include "ehn/tsv.hpp"

namespace ehn {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex_id(std::string_view content) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(content)));
    return buf;
}

DefGraph normalized(const DefGraph& g) { return parse_definition(serialize_definition(g)); }

const Sense& find_sense(const Lexicon& lex, const SenseConcept& sc) {
    for (const auto* s : lex.senses_of(sc.word))
        if (s->sense_index == sc.sense_index) return *s;
    throw std::invalid_argument("no sense " + sc.word + "#" + std::to_string(sc.sense_index) + " in the lexicon");
}

}  // namespace

AnnotationTask make_concept_analogy_task(const ConceptAnalogy& ca, const DefGraph& left, const DefGraph& right,
                                         const CompareOptions& opts) {
    AnnotationTask t;
    t.kind = TaskKind::ConceptAnalogy;
    t.analogy = ca;
    t.left_graph = normalized(left);
    t.right_graph = normalized(right);
    const auto diff = compare_graphs(t.left_graph, t.right_graph, opts);
    if (!diff || diff->left != ca.left.id || diff->right != ca.right.id)
        throw std::invalid_argument("definitions do not differ in exactly " + ca.left.id.str() + " / " +
                                    ca.right.id.str());
    t.left_node = diff->left_node;
    t.right_node = diff->right_node;
    t.id = hex_id("concept_analogy\n" + ca.key() + "\n" + serialize_definition(t.left_graph) + "\n" +
                  serialize_definition(t.right_graph));
    return t;
}

AnnotationTask make_synset_task(const ConceptId& id, std::vector<std::string> candidates) {
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    AnnotationTask t;
    t.kind = TaskKind::Synset;
    t.concept_id = id;
    t.candidates = std::move(candidates);
    t.id = hex_id("synset\n" + id.key() + "\n" + tsv::join(t.candidates, "\n"));
    return t;
}

std::vector<AnnotationTask> build_tasks(const Lexicon& lex, const FrequencyTable& freq,
                                        const std::vector<ConceptAnalogy>& cas, const ExtractionConfig& cfg) {
    std::vector<AnnotationTask> tasks;
    std::set<ConceptId> concepts;
    const CompareOptions opts{cfg.unordered_function_args};
    for (const auto& ca : cas) {
        const auto left = expand_definition(find_sense(lex, ca.left), lex, cfg.expansion_depth_limit);
        const auto right = expand_definition(find_sense(lex, ca.right), lex, cfg.expansion_depth_limit);
        tasks.push_back(make_concept_analogy_task(ca, left, right, opts));
        concepts.insert(ca.left.id);
        concepts.insert(ca.right.id);
    }
    for (const auto& c : concepts) {
        std::vector<std::string> words;
        for (const auto& w : lex.synset(c))
            if (is_common(freq, w, cfg.min_freq)) words.push_back(w);
        if (!words.empty()) tasks.push_back(make_synset_task(c, std::move(words)));
    }
    return tasks;
}

// ---------------------------------------------------------------------------

std::string Verdict::decision_text() const {
    if (decision) return *decision == Decision::Correct ? "correct" : "incorrect";
    std::string out;
    for (const auto& [w, d] : words) {
        if (!out.empty()) out += ";";
        out += w + (d == WordDecision::Keep ? "=keep" : "=remove");
    }
    return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t range = i;
        const std::uint64_t reject_below = (0 - range) % range;  // 2^64 mod range
        std::uint64_t x;
        do x = rng();
        while (x < reject_below);
        std::swap(perm[i - 1], perm[x % range]);
    }
    return perm;
}

Session Session::create(std::vector<AnnotationTask> tasks, std::vector<std::string> annotators, std::uint64_t seed) {
    if (tasks.empty()) throw std::invalid_argument("no tasks");
    if (annotators.empty()) throw std::invalid_argument("no annotators");
    Session s;
    s.seed_ = seed;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (!s.index_.emplace(tasks[i].id, i).second) throw std::invalid_argument("duplicate task id " + tasks[i].id);
    for (const auto& a : annotators) {
        if (a.empty()) throw std::invalid_argument("empty annotator id");
        if (s.queues_.count(a)) throw std::invalid_argument("duplicate annotator " + a);
        auto& q = s.queues_[a];
        for (auto i : seeded_permutation(tasks.size(), seed ^ fnv1a(a))) q.push_back(tasks[i].id);
    }
    s.tasks_ = std::move(tasks);
    s.annotators_ = std::move(annotators);
    return s;
}

bool Session::has_annotator(const std::string& a) const { return queues_.count(a) != 0; }

const AnnotationTask& Session::task(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw UnknownTask("unknown task " + id);
    return tasks_[it->second];
}

const std::vector<std::string>& Session::queue(const std::string& annotator) const {
    const auto it = queues_.find(annotator);
    if (it == queues_.end()) throw UnknownAnnotator("unknown annotator " + annotator);
    return it->second;
}

const AnnotationTask* Session::next_task(const std::string& annotator) const {
    for (const auto& id : queue(annotator))
        if (!verdicts_.count({id, annotator})) return &task(id);
    return nullptr;
}

std::size_t Session::labeled_by(const std::string& annotator) const {
    std::size_t n = 0;
    for (const auto& id : queue(annotator)) n += verdicts_.count({id, annotator});
    return n;
}

bool Session::submit(Verdict v) {
    const auto& t = task(v.task_id);
    if (!has_annotator(v.annotator)) throw UnknownAnnotator("unknown annotator " + v.annotator);
    if (t.kind == TaskKind::ConceptAnalogy) {
        if (!v.decision || !v.words.empty())
            throw BadVerdict("concept analogy tasks take a correct/incorrect decision");
    } else {
        if (v.decision || v.words.empty()) throw BadVerdict("synset tasks take per-word keep/remove decisions");
        for (const auto& [w, _] : v.words)
            if (!std::binary_search(t.candidates.begin(), t.candidates.end(), w))
                throw BadVerdict("'" + w + "' is not a candidate of task " + t.id);
    }
    const std::pair<std::string, std::string> key{v.task_id, v.annotator};
    const auto it = verdicts_.find(key);
    if (it != verdicts_.end()) {
        audit_.push_back(AuditEntry{it->second, v});
        it->second = std::move(v);
        return true;
    }
    verdicts_.emplace(key, std::move(v));
    return false;
}

bool operator==(const Session& a, const Session& b) { return a.to_json() == b.to_json(); }

// JSON -----------------------------------------------------------------------

namespace {

std::string_view kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Concept: return "concept";
        case NodeKind::Word: return "word";
        case NodeKind::Function: return "function";
        case NodeKind::SelfRef: return "selfref";
    }
    return "?";
}

json side_to_json(const SenseConcept& sc, const DefGraph& g, NodeId highlight) {
    return json{{"word", sc.word},
                {"sense", sc.sense_index},
                {"concept", sc.id.str()},
                {"definition", serialize_definition(g)},
                {"graph", graph_to_json(g)},
                {"highlight", highlight}};
}

void side_from_json(const json& j, SenseConcept& sc, DefGraph& g, NodeId& highlight) {
    sc.word = j.at("word").get<std::string>();
    sc.sense_index = j.at("sense").get<int>();
    sc.id = ConceptId::parse(j.at("concept").get<std::string>());
    g = parse_definition(j.at("definition").get<std::string>());
    highlight = j.at("highlight").get<NodeId>();
    if (highlight >= g.size()) throw std::invalid_argument("highlight out of range");
}

}  // namespace

json graph_to_json(const DefGraph& g) {
    json nodes = json::array();
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto& n = g.node(i);
        nodes.push_back({{"id", i}, {"kind", kind_name(n.kind)}, {"label", n.label()}});
    }
    json edges = json::array();
    for (const auto& e : g.edges()) {
        json je{{"source", e.source}, {"target", e.target}};
        if (e.edge.kind == EdgeKind::Arg) {
            je["kind"] = "arg";
            je["label"] = "arg" + std::to_string(e.edge.index);
            je["index"] = e.edge.index;
        } else {
            je["kind"] = "attribute";
            je["label"] = e.edge.label;
        }
        edges.push_back(std::move(je));
    }
    return json{{"root", g.root()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json task_to_json(const AnnotationTask& t) {
    if (t.kind == TaskKind::ConceptAnalogy)
        return json{{"id", t.id},
                    {"kind", "concept_analogy"},
                    {"left", side_to_json(t.analogy.left, t.left_graph, t.left_node)},
                    {"right", side_to_json(t.analogy.right, t.right_graph, t.right_node)}};
    return json{{"id", t.id}, {"kind", "synset"}, {"concept", t.concept_id.str()}, {"candidates", t.candidates}};
}

AnnotationTask task_from_json(const json& j) {
    AnnotationTask t;
    t.id = j.at("id").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "concept_analogy") {
        t.kind = TaskKind::ConceptAnalogy;
        side_from_json(j.at("left"), t.analogy.left, t.left_graph, t.left_node);
        side_from_json(j.at("right"), t.analogy.right, t.right_graph, t.right_node);
    } else if (kind == "synset") {
        t.kind = TaskKind::Synset;
        t.concept_id = ConceptId::parse(j.at("concept").get<std::string>());
        t.candidates = j.at("candidates").get<std::vector<std::string>>();
    } else {
        throw std::invalid_argument("unknown task kind '" + kind + "'");
    }
    return t;
}

json verdict_to_json(const Verdict& v) {
    json j{{"task_id", v.task_id}, {"annotator", v.annotator}, {"timestamp", v.timestamp}};
    if (v.decision) j["decision"] = *v.decision == Decision::Correct ? "correct" : "incorrect";
    if (!v.words.empty()) {
        json w = json::object();
        for (const auto& [word, d] : v.words) w[word] = d == WordDecision::Keep ? "keep" : "remove";
        j["words"] = std::move(w);
    }
    return j;
}

Verdict verdict_from_json(const json& j) {
    if (!j.is_object()) throw BadVerdict("verdict must be a JSON object");
    auto str_field = [&](const char* name, bool required) -> std::string {
        const auto it = j.find(name);
        if (it == j.end() || it->is_null()) {
            if (required) throw BadVerdict(std::string("missing '") + name + "'");
            return {};
        }
        if (!it->is_string()) throw BadVerdict(std::string("'") + name + "' must be a string");
        return it->get<std::string>();
    };
    Verdict v;
    v.task_id = str_field("task_id", false);
    v.annotator = str_field("annotator", true);
    v.timestamp = str_field("timestamp", false);

    auto read_words = [&](const json& w) {
        if (!w.is_object()) throw BadVerdict("per-word decisions must be an object");
        for (const auto& [word, d] : w.items()) {
            if (d == "keep")
                v.words[word] = WordDecision::Keep;
            else if (d == "remove")
                v.words[word] = WordDecision::Remove;
            else
                throw BadVerdict("word decision for '" + word + "' must be keep or remove");
        }
    };
    if (const auto it = j.find("decision"); it != j.end() && !it->is_null()) {
        if (it->is_object()) {
            read_words(*it);
        } else if (*it == "correct") {
            v.decision = Decision::Correct;
        } else if (*it == "incorrect") {
            v.decision = Decision::Incorrect;
        } else {
            throw BadVerdict("decision must be correct or incorrect");
        }
    }
    if (const auto it = j.find("words"); it != j.end() && !it->is_null()) read_words(*it);
    if (!v.decision && v.words.empty()) throw BadVerdict("missing decision");
    return v;
}

json Session::to_json() const {
    json tasks = json::array();
    for (const auto& t : tasks_) tasks.push_back(task_to_json(t));
    json verdicts = json::array();
    for (const auto& [_, v] : verdicts_) verdicts.push_back(verdict_to_json(v));
    json audit = json::array();
    for (const auto& a : audit_)
        audit.push_back({{"previous", verdict_to_json(a.previous)}, {"replacement", verdict_to_json(a.replacement)}});
    return json{{"version", 1},         {"seed", seed_},         {"annotators", annotators_}, {"tasks", std::move(tasks)},
                {"queues", queues_},    {"verdicts", std::move(verdicts)}, {"audit", std::move(audit)}};
}

Session Session::from_json(const json& j) {
    if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported session version");
    Session s;
    s.seed_ = j.at("seed").get<std::uint64_t>();
    s.annotators_ = j.at("annotators").get<std::vector<std::string>>();
    for (const auto& jt : j.at("tasks")) {
        auto t = task_from_json(jt);
        if (!s.index_.emplace(t.id, s.tasks_.size()).second) throw std::invalid_argument("duplicate task id " + t.id);
        s.tasks_.push_back(std::move(t));
    }
    s.queues_ = j.at("queues").get<std::map<std::string, std::vector<std::string>>>();
    for (const auto& a : s.annotators_)
        if (!s.queues_.count(a)) throw std::invalid_argument("annotator " + a + " has no queue");
    for (const auto& [a, q] : s.queues_)
        for (const auto& id : q) s.task(id);
    for (const auto& jv : j.at("verdicts")) {
        auto v = verdict_from_json(jv);
        s.task(v.task_id);
        s.verdicts_[{v.task_id, v.annotator}] = std::move(v);
    }
    for (const auto& ja : j.at("audit"))
        s.audit_.push_back(AuditEntry{verdict_from_json(ja.at("previous")), verdict_from_json(ja.at("replacement"))});
    return s;
}

std::string export_verdicts_tsv(const Session& s) {
    std::string out = "task_id\tannotator\tdecision\n";
    for (const auto& [key, v] : s.verdicts()) out += key.first + "\t" + key.second + "\t" + v.decision_text() + "\n";
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Store ----------------------------------------------------------------------

SessionStore::SessionStore(std::filesystem::path dir, Session session, std::size_t log_entries,
                           std::size_t snapshot_every)
    : dir_(std::move(dir)),
      session_(std::move(session)),
      log_entries_(log_entries),
      snapshot_every_(std::max<std::size_t>(1, snapshot_every)) {}

SessionStore::~SessionStore() {
    try {
        flush();
    } catch (...) {
    }
}

std::unique_ptr<SessionStore> SessionStore::create(const std::filesystem::path& dir, Session session,
                                                   std::size_t snapshot_every) {
    std::filesystem::create_directories(dir);
    std::unique_ptr<SessionStore> store(new SessionStore(dir, std::move(session), 0, snapshot_every));
    store->log_.open(log_path(dir), std::ios::binary | std::ios::trunc);
    if (!store->log_) throw LoadError(log_path(dir).string(), 0, "cannot open for writing");
    store->write_snapshot_locked();
    return store;
}

std::unique_ptr<SessionStore> SessionStore::open(const std::filesystem::path& dir, std::size_t snapshot_every) {
    const auto snap = snapshot_path(dir);
    json j;
    try {
        j = json::parse(tsv::read_file(snap));
    } catch (const json::exception& e) {
        throw LoadError(snap.string(), 0, e.what());
    }
    Session session;
    std::size_t in_snapshot = 0;
    try {
        in_snapshot = j.at("log_entries").get<std::size_t>();
        session = Session::from_json(j.at("session"));
    } catch (const std::exception& e) {
        throw LoadError(snap.string(), 0, e.what());
    }

    // Replay what the snapshot has not seen. A final line without a newline
    // is an interrupted append and is discarded.
    const auto logp = log_path(dir);
    std::string text = std::filesystem::exists(logp) ? tsv::read_file(logp) : std::string();
    if (!text.empty() && text.back() != '\n') text.erase(text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1);
    std::size_t entries = 0;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        if (tsv::trim(row).empty()) return;
        ++entries;
        if (entries <= in_snapshot) return;
        try {
            session.submit(verdict_from_json(json::parse(row).at("verdict")));
        } catch (const std::exception& e) {
            throw LoadError(logp.string(), line, e.what());
        }
    });
    if (entries < in_snapshot) throw LoadError(logp.string(), 0, "log is shorter than the snapshot records");

    std::unique_ptr<SessionStore> store(new SessionStore(dir, std::move(session), entries, snapshot_every));
    store->snapshot_entries_ = in_snapshot;
    // Rewrite the log so a discarded partial line does not precede new entries.
    tsv::write_file(logp, text);
    store->log_.open(logp, std::ios::binary | std::ios::app);
    if (!store->log_) throw LoadError(logp.string(), 0, "cannot open for appending");
    return store;
}

bool SessionStore::submit(Verdict v) {
    std::unique_lock lock(mutex_);
    if (v.timestamp.empty()) v.timestamp = utc_timestamp();
    const json entry{{"seq", log_entries_ + 1}, {"verdict", verdict_to_json(v)}};
    const bool overwritten = session_.submit(std::move(v));
    log_ << entry.dump() << '\n';
    log_.flush();
    ++log_entries_;
    if (log_entries_ - snapshot_entries_ >= snapshot_every_) write_snapshot_locked();
    return overwritten;
}

void SessionStore::flush() {
    std::unique_lock lock(mutex_);
    log_.flush();
    write_snapshot_locked();
}

void SessionStore::write_snapshot_locked() {
    const json j{{"log_entries", log_entries_}, {"session", session_.to_json()}};
    tsv::write_file(snapshot_path(dir_), j.dump(1) + "\n");
    snapshot_entries_ = log_entries_;
}

// Agreement ------------------------------------------------------------------

json AgreementReport::to_json() const {
    json j{{"n_items", n_items}, {"n_annotators", n_annotators}, {"annotators", annotators}};
    j["kappa"] = kappa ? json(*kappa) : json(nullptr);
    j["mean_pairwise_cohen"] = mean_pairwise_cohen ? json(*mean_pairwise_cohen) : json(nullptr);
    return j;
}

AgreementReport agreement(const Session& s) {
    AgreementReport r;
    r.annotators = s.annotators();
    r.n_annotators = r.annotators.size();
    LabelMatrix labels;
    for (const auto& t : s.tasks()) {
        if (t.kind != TaskKind::ConceptAnalogy) continue;
        std::vector<std::string> row;
        for (const auto& a : r.annotators) {
            const auto it = s.verdicts().find({t.id, a});
            if (it == s.verdicts().end() || !it->second.decision) break;
            row.push_back(it->second.decision_text());
        }
        if (row.size() == r.annotators.size()) labels.push_back(std::move(row));
    }
    r.n_items = labels.size();
    if (r.n_annotators < 2 || labels.empty()) return r;
    try {
        r.kappa = fleiss_kappa(labels);
    } catch (const DegenerateAgreement&) {
    }
    try {
        r.mean_pairwise_cohen = mean_pairwise_cohen(labels);
    } catch (const DegenerateAgreement&) {
    }
    return r;
}

// Applying verdicts ----------------------------------------------------------

VerdictBook collect_verdicts(const Session& s) {
    VerdictBook book;
    for (const auto& [key, v] : s.verdicts()) {
        const auto& t = s.task(key.first);
        if (t.kind == TaskKind::ConceptAnalogy) {
            if (v.decision) book.analogies[t.analogy.key()].push_back(*v.decision);
        } else {
            for (const auto& [w, d] : v.words)
                if (d == WordDecision::Remove) book.removed[t.concept_id].insert(w);
        }
    }
    return book;
}

bool keep_analogy(const VerdictBook& book, const ConceptAnalogy& ca, const VerdictPolicy& policy) {
    const auto it = book.analogies.find(ca.key());
    if (it == book.analogies.end() || it->second.empty()) return policy.unlabeled == UnlabeledPolicy::Permissive;
    const auto correct = std::count(it->second.begin(), it->second.end(), Decision::Correct);
    const auto incorrect = static_cast<long>(it->second.size()) - correct;
    return correct > incorrect;
}

namespace {

bool word_removed(const VerdictBook& book, const ConceptId& c, const std::string& w) {
    const auto it = book.removed.find(c);
    return it != book.removed.end() && it->second.count(w);
}

}  // namespace

FilteredAnnotations apply_verdicts(const std::vector<ConceptAnalogy>& cas,
                                   const std::map<ConceptId, std::vector<std::string>>& synsets,
                                   const VerdictBook& book, const VerdictPolicy& policy) {
    FilteredAnnotations out;
    for (const auto& ca : cas)
        if (keep_analogy(book, ca, policy)) out.concept_analogies.push_back(ca);
    for (const auto& [c, words] : synsets) {
        auto& kept = out.synsets[c];
        for (const auto& w : words)
            if (!word_removed(book, c, w)) kept.push_back(w);
    }
    return out;
}

VerdictFilter make_verdict_filter(const VerdictBook& book, const VerdictPolicy& policy) {
    VerdictFilter f;
    f.keep_analogy = [&book, policy](const ConceptAnalogy& ca) { return keep_analogy(book, ca, policy); };
    f.keep_word = [&book](const ConceptId& c, const std::string& w) { return !word_removed(book, c, w); };
    return f;
}

}  // namespace ehn
