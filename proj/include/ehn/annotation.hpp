#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehn/defgraph.hpp"
#include "ehn/extraction.hpp"
#include "ehn/lexicon.hpp"

namespace ehn {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

enum class TaskKind { ConceptAnalogy, Synset };

struct AnnotationTask {
    std::string id;  // 16 hex digits of fnv1a over the content
    TaskKind kind = TaskKind::ConceptAnalogy;

    // TaskKind::ConceptAnalogy. Graphs are in serialized node order, so the
    // highlighted node ids survive a save/load.
    ConceptAnalogy analogy;
    DefGraph left_graph;
    DefGraph right_graph;
    NodeId left_node = 0;
    NodeId right_node = 0;

    // TaskKind::Synset
    ConceptId concept_id;
    std::vector<std::string> candidates;
};

/// Throws std::invalid_argument unless the graphs differ in exactly one
/// concept pair.
AnnotationTask make_concept_analogy_task(const ConceptAnalogy& ca, const DefGraph& left, const DefGraph& right,
                                         const CompareOptions& opts = {});
AnnotationTask make_synset_task(const ConceptId& id, std::vector<std::string> candidates);

/// One task per concept analogy, then one synset task per distinct concept
/// they mention that has common words. Senses are expanded as in
/// extraction.
std::vector<AnnotationTask> build_tasks(const Lexicon& lex, const FrequencyTable& freq,
                                        const std::vector<ConceptAnalogy>& cas, const ExtractionConfig& cfg);

enum class Decision { Correct, Incorrect };
enum class WordDecision { Keep, Remove };

struct Verdict {
    std::string task_id;
    std::string annotator;
    std::optional<Decision> decision;             // concept analogy tasks
    std::map<std::string, WordDecision> words;    // synset tasks
    std::string timestamp;                        // ISO 8601 UTC

    /// "correct", "incorrect", or "w1=keep;w2=remove" for synset tasks.
    std::string decision_text() const;
    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct AuditEntry {
    Verdict previous;
    Verdict replacement;
    friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

class UnknownTask : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};
class UnknownAnnotator : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};
/// Well-formed request that does not fit the task (wrong decision shape).
class BadVerdict : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fisher-Yates over [0, n) driven by mt19937_64 with rejection sampling,
/// so the order depends only on the seed.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

class Session {
public:
    /// Throws std::invalid_argument on an empty task list, duplicate task
    /// ids, no annotators or duplicate annotators.
    static Session create(std::vector<AnnotationTask> tasks, std::vector<std::string> annotators, std::uint64_t seed);

    const std::vector<AnnotationTask>& tasks() const noexcept { return tasks_; }
    const std::vector<std::string>& annotators() const noexcept { return annotators_; }
    std::uint64_t seed() const noexcept { return seed_; }
    bool has_annotator(const std::string& a) const;
    /// Throws UnknownTask.
    const AnnotationTask& task(const std::string& id) const;
    /// Task ids in presentation order. Throws UnknownAnnotator.
    const std::vector<std::string>& queue(const std::string& annotator) const;
    /// First task in the annotator's queue without a verdict from them.
    const AnnotationTask* next_task(const std::string& annotator) const;
    std::size_t labeled_by(const std::string& annotator) const;

    /// Stores the verdict; returns true when it replaced an earlier one, in
    /// which case an audit entry is appended. Throws UnknownTask,
    /// UnknownAnnotator or BadVerdict.
    bool submit(Verdict v);

    /// Keyed by (task_id, annotator).
    const std::map<std::pair<std::string, std::string>, Verdict>& verdicts() const noexcept { return verdicts_; }
    const std::vector<AuditEntry>& audit() const noexcept { return audit_; }

    nlohmann::json to_json() const;
    static Session from_json(const nlohmann::json& j);

    friend bool operator==(const Session& a, const Session& b);

private:
    std::vector<AnnotationTask> tasks_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::string> annotators_;
    std::map<std::string, std::vector<std::string>> queues_;
    std::map<std::pair<std::string, std::string>, Verdict> verdicts_;
    std::vector<AuditEntry> audit_;
    std::uint64_t seed_ = 0;
};

// JSON shapes shared by the session file and the HTTP interface.
nlohmann::json graph_to_json(const DefGraph& g);
nlohmann::json task_to_json(const AnnotationTask& t);
AnnotationTask task_from_json(const nlohmann::json& j);
nlohmann::json verdict_to_json(const Verdict& v);
/// Throws BadVerdict on a malformed object.
Verdict verdict_from_json(const nlohmann::json& j);

/// task_id, annotator, decision; header line first, rows sorted.
std::string export_verdicts_tsv(const Session& s);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

/// Session on disk: session.json snapshot plus append-only verdicts.log of
/// every accepted submission. The snapshot records how many log entries it
/// already contains; open() replays the rest. Writes are serialized, reads
/// may run concurrently.
class SessionStore {
public:
    /// Writes a fresh snapshot and an empty log into `dir`.
    static std::unique_ptr<SessionStore> create(const std::filesystem::path& dir, Session session,
                                                std::size_t snapshot_every = 50);
    /// Throws LoadError when the snapshot or log is unreadable.
    static std::unique_ptr<SessionStore> open(const std::filesystem::path& dir, std::size_t snapshot_every = 50);

    ~SessionStore();

    /// Fills an empty timestamp, applies, appends to the log.
    bool submit(Verdict v);
    /// Writes a snapshot and flushes the log.
    void flush();

    template <class F>
    auto read(F&& fn) const {
        std::shared_lock lock(mutex_);
        return fn(session_);
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }
    static std::filesystem::path snapshot_path(const std::filesystem::path& dir) { return dir / "session.json"; }
    static std::filesystem::path log_path(const std::filesystem::path& dir) { return dir / "verdicts.log"; }

private:
    SessionStore(std::filesystem::path dir, Session session, std::size_t log_entries, std::size_t snapshot_every);
    void write_snapshot_locked();

    mutable std::shared_mutex mutex_;
    std::filesystem::path dir_;
    Session session_;
    std::ofstream log_;
    std::size_t log_entries_ = 0;
    std::size_t snapshot_entries_ = 0;
    std::size_t snapshot_every_;
};

// Agreement ------------------------------------------------------------------

struct AgreementReport {
    /// Fleiss' kappa; unset when fewer than two annotators, no fully labeled
    /// items, or a degenerate label distribution.
    std::optional<double> kappa;
    std::optional<double> mean_pairwise_cohen;
    std::size_t n_items = 0;
    std::size_t n_annotators = 0;
    std::vector<std::string> annotators;

    nlohmann::json to_json() const;
};

/// Over concept analogy tasks labeled by every session annotator.
AgreementReport agreement(const Session& s);

// Applying verdicts ----------------------------------------------------------

enum class UnlabeledPolicy { Permissive, Strict };

struct VerdictPolicy {
    /// Unlabeled analogies are kept when permissive, dropped when strict.
    UnlabeledPolicy unlabeled = UnlabeledPolicy::Permissive;
};

/// Verdicts regrouped by content rather than by task id.
struct VerdictBook {
    std::map<std::string, std::vector<Decision>> analogies;  // ConceptAnalogy::key()
    std::map<ConceptId, std::set<std::string>> removed;      // any Remove
};

VerdictBook collect_verdicts(const Session& s);

/// More Correct than Incorrect keeps; ties and majorities of Incorrect drop.
bool keep_analogy(const VerdictBook& book, const ConceptAnalogy& ca, const VerdictPolicy& policy);

struct FilteredAnnotations {
    std::vector<ConceptAnalogy> concept_analogies;
    std::map<ConceptId, std::vector<std::string>> synsets;
};

/// Subset of the input; idempotent.
FilteredAnnotations apply_verdicts(const std::vector<ConceptAnalogy>& cas,
                                   const std::map<ConceptId, std::vector<std::string>>& synsets,
                                   const VerdictBook& book, const VerdictPolicy& policy = {});

/// Extraction hooks equivalent to apply_verdicts. `book` must outlive the
/// returned filter.
VerdictFilter make_verdict_filter(const VerdictBook& book, const VerdictPolicy& policy = {});

}  // namespace ehn
