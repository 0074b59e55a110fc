#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehn/defgraph.hpp"
#include "ehn/lexicon.hpp"

namespace ehn {

/// One side of a concept analogy: a word sense and the concept at which
/// its (expanded) definition differs from the other side.
struct SenseConcept {
    std::string word;
    int sense_index = 1;
    ConceptId id;

    friend bool operator==(const SenseConcept&, const SenseConcept&) = default;
    friend std::strong_ordering operator<=>(const SenseConcept& a, const SenseConcept& b) {
        if (auto c = a.word <=> b.word; c != 0) return c;
        if (auto c = a.sense_index <=> b.sense_index; c != 0) return c;
        return a.id <=> b.id;
    }
};

/// left.word : left.id = right.word : right.id
struct ConceptAnalogy {
    SenseConcept left;
    SenseConcept right;

    /// Stable textual identity, used to match annotation verdicts.
    std::string key() const;

    friend bool operator==(const ConceptAnalogy&, const ConceptAnalogy&) = default;
    friend auto operator<=>(const ConceptAnalogy&, const ConceptAnalogy&) = default;
};

/// w1 : w2 = w3 : synset
struct Analogy {
    std::string w1;
    std::string w2;
    std::string w3;
    std::vector<std::string> synset;  // sorted, unique, non-empty

    friend bool operator==(const Analogy&, const Analogy&) = default;
    friend auto operator<=>(const Analogy&, const Analogy&) = default;
};

struct ExtractionConfig {
    /// Every word and concept must lie under this taxon; unset disables the
    /// check.
    std::optional<ConceptId> concrete_root = ConceptId("physical", "物質");
    std::uint64_t min_freq = 5;
    int expansion_depth_limit = 8;
    /// Compare function arguments as an unordered multiset.
    bool unordered_function_args = false;
    /// Worker threads for sense expansion and pair comparison (0 = all cores).
    unsigned jobs = 1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

class ExpansionCycle : public std::runtime_error {
public:
    explicit ExpansionCycle(std::vector<ConceptId> path);
    /// Concepts visited, ending with the one reached twice.
    const std::vector<ConceptId>& path() const noexcept { return path_; }

private:
    std::vector<ConceptId> path_;
};

/// While `def` is a single ConceptNode, replaces it with that concept's
/// definition. Stops at a multi-node graph, at a concept without a
/// definition, or after `limit` replacements. Throws ExpansionCycle when a
/// concept is reached twice.
DefGraph expand_definition(const DefGraph& def, const Lexicon& lex, int limit);
inline DefGraph expand_definition(const Sense& s, const Lexicon& lex, int limit) {
    return expand_definition(s.definition, lex, limit);
}

struct CompareOptions {
    bool unordered_args = false;
};

/// The single differing node pair found by compare_graphs.
struct GraphDiff {
    NodeId left_node = 0;
    NodeId right_node = 0;
    ConceptId left;
    ConceptId right;
};

/// Returns the differing pair iff some structure-preserving correspondence
/// between the two graphs (same shape, edge labels and argument order,
/// SelfRef to SelfRef, equal function names) leaves exactly one mismatched
/// node pair and both of those nodes are concepts. Attribute children with
/// the same label are matched as a multiset.
std::optional<GraphDiff> compare_graphs(const DefGraph& a, const DefGraph& b, const CompareOptions& opts = {});

/// Verdict hooks applied during extraction. Unset members keep everything.
struct VerdictFilter {
    std::function<bool(const ConceptAnalogy&)> keep_analogy;
    std::function<bool(const ConceptId&, const std::string&)> keep_word;
};

struct ExtractionReport {
    std::size_t senses = 0;
    std::size_t senses_trivial = 0;   // still a single concept after expansion
    std::size_t senses_skipped = 0;   // expansion failed
    std::size_t candidates = 0;       // concept analogies from graph comparison
    std::size_t after_concrete = 0;
    std::size_t after_frequency = 0;
    std::size_t after_verdicts = 0;
    std::size_t analogies = 0;
    std::vector<std::string> skipped;  // one line per skipped sense

    std::string to_text(const ExtractionConfig& cfg) const;
};

struct ExtractionResult {
    /// Concept analogies that passed the concrete and frequency filters,
    /// before verdicts; the annotation task source.
    std::vector<ConceptAnalogy> concept_analogies;
    std::vector<Analogy> analogies;
    ExtractionReport report;
};

/// Expansion, comparison, left/right expansion and filtering over every
/// pair of senses of distinct words. Per-sense failures are logged in the
/// report and never abort the run. Output is sorted and deduplicated.
ExtractionResult extract_analogies(const Lexicon& lex, const Taxonomy& tax, const FrequencyTable& freq,
                                   const ExtractionConfig& cfg, const VerdictFilter* verdicts = nullptr);

// File formats ---------------------------------------------------------------

std::string analogies_to_tsv(const std::vector<Analogy>& analogies);
std::vector<Analogy> parse_analogies(std::string_view tsv, const std::string& source = "<memory>");
std::vector<Analogy> load_analogies(const std::filesystem::path& path);

std::string concept_analogies_to_tsv(const std::vector<ConceptAnalogy>& cas);
std::vector<ConceptAnalogy> parse_concept_analogies(std::string_view tsv, const std::string& source = "<memory>");
std::vector<ConceptAnalogy> load_concept_analogies(const std::filesystem::path& path);

}  // namespace ehn
