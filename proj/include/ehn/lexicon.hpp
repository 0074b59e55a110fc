#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ehn/defgraph.hpp"

namespace ehn {

struct Sense {
    std::string word;
    int sense_index = 1;
    DefGraph definition;
    std::string english_gloss;

    /// "實驗室#1"
    std::string tag() const { return word + "#" + std::to_string(sense_index); }
};

struct ConceptEntry {
    ConceptId id;
    std::optional<DefGraph> definition;  // absent for taxonomy roots
    std::string english_gloss;
};

/// Words with numbered senses, concept definitions and the attribute
/// inventory. Immutable once built; all queries are const.
class Lexicon {
public:
    void add_attribute(std::string name);
    /// Throws std::invalid_argument on a duplicate (word, sense_index).
    void add_sense(Sense sense);
    /// Throws std::invalid_argument on a duplicate concept.
    void add_concept(ConceptEntry entry);

    const std::vector<Sense>& senses() const noexcept { return senses_; }
    const std::set<std::string>& attributes() const noexcept { return attributes_; }
    const std::unordered_map<ConceptId, ConceptEntry, ConceptIdHash>& concepts() const noexcept { return concepts_; }

    /// Senses of `word` ordered by sense index; empty for unknown words.
    std::vector<const Sense*> senses_of(const std::string& word) const;
    const ConceptEntry* find_concept(const ConceptId& id) const;
    /// Distinct words, codepoint order.
    std::vector<std::string> words() const;

    /// Words with a sense whose definition is exactly the single concept
    /// `id`. Sorted by codepoint, no duplicates; empty for unknown ids.
    const std::vector<std::string>& synset(const ConceptId& id) const;

    friend bool operator==(const Lexicon& a, const Lexicon& b);

private:
    std::vector<Sense> senses_;
    std::map<std::string, std::vector<std::size_t>> by_word_;
    std::unordered_map<ConceptId, ConceptEntry, ConceptIdHash> concepts_;
    std::set<std::string> attributes_;
    std::unordered_map<ConceptId, std::vector<std::string>, ConceptIdHash> synsets_;
};

/// Reads lexicon.tsv (token, kind, sense_index, definition, english_gloss).
/// Throws LoadError with the offending line; definition errors carry the
/// parser's byte offset in the message.
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::string_view tsv, const std::string& source = "<memory>");
std::string to_tsv(const Lexicon& lex);
void save_lexicon(const Lexicon& lex, const std::filesystem::path& path);

std::vector<std::string> synset_of(const Lexicon& lex, const ConceptId& id);

// ---------------------------------------------------------------------------

class UnknownConcept : public std::out_of_range {
public:
    explicit UnknownConcept(const ConceptId& id) : std::out_of_range("unknown concept " + id.str()) {}
};

/// Single-rooted concept tree plus the words attached to each node.
class Taxonomy {
public:
    Taxonomy() = default;
    /// Each pair is (child, parent); exactly one pair has no parent.
    /// Throws std::invalid_argument on multiple roots, unknown parents,
    /// duplicate children or cycles.
    explicit Taxonomy(const std::vector<std::pair<ConceptId, std::optional<ConceptId>>>& links);

    bool contains(const ConceptId& id) const { return parent_.count(id) != 0; }
    const ConceptId& root() const { return root_; }
    std::size_t size() const noexcept { return parent_.size(); }
    /// Throws UnknownConcept.
    const std::optional<ConceptId>& parent(const ConceptId& id) const;
    const std::vector<ConceptId>& children(const ConceptId& id) const;
    /// All concepts, sorted.
    std::vector<ConceptId> concepts() const;

    /// Attaches to every node the words trivially defined by it.
    void attach_words(const Lexicon& lex);
    const std::vector<std::string>& attached_words(const ConceptId& id) const;

private:
    std::unordered_map<ConceptId, std::optional<ConceptId>, ConceptIdHash> parent_;
    std::unordered_map<ConceptId, std::vector<ConceptId>, ConceptIdHash> children_;
    std::unordered_map<ConceptId, std::vector<std::string>, ConceptIdHash> words_;
    ConceptId root_;
};

Taxonomy load_taxonomy(const std::filesystem::path& path);
Taxonomy parse_taxonomy(std::string_view tsv, const std::string& source = "<memory>");

/// True iff `ancestor` is on the root path of `c` (reflexive).
/// Throws UnknownConcept when either id is missing.
bool is_under(const Taxonomy& tax, const ConceptId& c, const ConceptId& ancestor);

// ---------------------------------------------------------------------------

class FrequencyTable {
public:
    void set(std::string word, std::uint64_t count) { counts_[std::move(word)] = count; }
    std::uint64_t count(const std::string& word) const;
    std::size_t size() const noexcept { return counts_.size(); }

private:
    std::unordered_map<std::string, std::uint64_t> counts_;
};

FrequencyTable load_frequency(const std::filesystem::path& path);
FrequencyTable parse_frequency(std::string_view tsv, const std::string& source = "<memory>");

inline bool is_common(const FrequencyTable& freq, const std::string& word, std::uint64_t threshold) {
    return freq.count(word) >= threshold;
}

}  // namespace ehn
