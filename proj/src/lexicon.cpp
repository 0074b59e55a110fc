#include "ehn/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <unordered_set>

#include "ehn/tsv.hpp"

namespace ehn {

namespace {

const std::vector<std::string> kNoWords;
const std::vector<ConceptId> kNoConcepts;

std::optional<long long> parse_int(std::string_view s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) return std::nullopt;
    return v;
}

void insert_sorted_unique(std::vector<std::string>& v, const std::string& w) {
    const auto it = std::lower_bound(v.begin(), v.end(), w);
    if (it == v.end() || *it != w) v.insert(it, w);
}

}  // namespace

void Lexicon::add_attribute(std::string name) { attributes_.insert(std::move(name)); }

void Lexicon::add_sense(Sense sense) {
    auto& indices = by_word_[sense.word];
    for (auto i : indices)
        if (senses_[i].sense_index == sense.sense_index)
            throw std::invalid_argument("duplicate sense " + sense.tag());
    if (sense.definition.is_single_concept())
        insert_sorted_unique(synsets_[sense.definition.node(0).id], sense.word);
    indices.push_back(senses_.size());
    senses_.push_back(std::move(sense));
    std::sort(indices.begin(), indices.end(),
              [this](std::size_t a, std::size_t b) { return senses_[a].sense_index < senses_[b].sense_index; });
}

void Lexicon::add_concept(ConceptEntry entry) {
    const auto id = entry.id;
    if (!concepts_.emplace(id, std::move(entry)).second)
        throw std::invalid_argument("duplicate concept " + id.str());
}

std::vector<const Sense*> Lexicon::senses_of(const std::string& word) const {
    std::vector<const Sense*> out;
    if (const auto it = by_word_.find(word); it != by_word_.end())
        for (auto i : it->second) out.push_back(&senses_[i]);
    return out;
}

const ConceptEntry* Lexicon::find_concept(const ConceptId& id) const {
    const auto it = concepts_.find(id);
    return it == concepts_.end() ? nullptr : &it->second;
}

std::vector<std::string> Lexicon::words() const {
    std::vector<std::string> out;
    out.reserve(by_word_.size());
    for (const auto& [w, _] : by_word_) out.push_back(w);
    return out;
}

const std::vector<std::string>& Lexicon::synset(const ConceptId& id) const {
    const auto it = synsets_.find(id);
    return it == synsets_.end() ? kNoWords : it->second;
}

bool operator==(const Lexicon& a, const Lexicon& b) {
    if (a.attributes_ != b.attributes_ || a.senses_.size() != b.senses_.size() ||
        a.concepts_.size() != b.concepts_.size() || a.by_word_.size() != b.by_word_.size())
        return false;
    for (const auto& [id, entry] : a.concepts_) {
        const auto* other = b.find_concept(id);
        if (!other || other->english_gloss != entry.english_gloss ||
            other->definition.has_value() != entry.definition.has_value())
            return false;
        if (entry.definition && !(*entry.definition == *other->definition)) return false;
    }
    for (const auto& s : a.senses_) {
        const auto other = b.senses_of(s.word);
        const auto it = std::find_if(other.begin(), other.end(),
                                     [&](const Sense* o) { return o->sense_index == s.sense_index; });
        if (it == other.end() || (*it)->english_gloss != s.english_gloss || !((*it)->definition == s.definition))
            return false;
    }
    return true;
}

std::vector<std::string> synset_of(const Lexicon& lex, const ConceptId& id) { return lex.synset(id); }

// ---------------------------------------------------------------------------

Lexicon parse_lexicon(std::string_view text, const std::string& source) {
    Lexicon lex;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        if (tsv::trim(row).empty() || row.front() == '#') return;
        const auto cols = tsv::split(row);
        if (cols.size() < 4 || cols.size() > 5)
            throw LoadError(source, line, "expected 5 columns, found " + std::to_string(cols.size()));
        const std::string token(cols[0]);
        const auto kind_col = cols[1];
        const auto index_col = cols[2];
        const auto def_col = tsv::trim(cols[3]);
        const std::string gloss = cols.size() == 5 ? std::string(cols[4]) : std::string();

        TokenKind kind;
        try {
            kind = classify_token(token);
        } catch (const ClassificationError& e) {
            throw LoadError(source, line, e.what());
        }
        if (kind_col != to_string(kind))
            throw LoadError(source, line,
                            "token '" + token + "' is a " + std::string(to_string(kind)) + ", row says '" +
                                std::string(kind_col) + "'");

        auto parse_def = [&]() {
            try {
                return parse_definition(def_col);
            } catch (const ParseError& e) {
                throw LoadError(source, line, "definition " + std::string(e.what()));
            }
        };

        try {
            switch (kind) {
                case TokenKind::Attribute:
                    if (!def_col.empty()) throw LoadError(source, line, "attributes carry no definition");
                    lex.add_attribute(token);
                    break;
                case TokenKind::Concept: {
                    if (!index_col.empty() && !parse_int(index_col))
                        throw LoadError(source, line, "bad sense index '" + std::string(index_col) + "'");
                    ConceptEntry entry{ConceptId::parse(token), std::nullopt, gloss};
                    if (!def_col.empty()) entry.definition = parse_def();
                    lex.add_concept(std::move(entry));
                    break;
                }
                case TokenKind::Word: {
                    const auto index = parse_int(index_col);
                    if (!index || *index < 1)
                        throw LoadError(source, line, "word rows need a positive sense index");
                    if (def_col.empty()) throw LoadError(source, line, "word sense without definition");
                    lex.add_sense(Sense{token, static_cast<int>(*index), parse_def(), gloss});
                    break;
                }
            }
        } catch (const std::invalid_argument& e) {
            throw LoadError(source, line, e.what());
        }
    });
    return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    return parse_lexicon(tsv::read_file(path), path.string());
}

std::string to_tsv(const Lexicon& lex) {
    std::string out;
    for (const auto& a : lex.attributes()) out += a + "\tattribute\t\t\t\n";
    std::vector<const ConceptEntry*> concepts;
    for (const auto& [_, entry] : lex.concepts()) concepts.push_back(&entry);
    std::sort(concepts.begin(), concepts.end(), [](auto* x, auto* y) { return x->id < y->id; });
    for (const auto* c : concepts) {
        out += c->id.str() + "\tconcept\t\t";
        if (c->definition) out += serialize_definition(*c->definition);
        out += "\t" + c->english_gloss + "\n";
    }
    for (const auto& w : lex.words())
        for (const auto* s : lex.senses_of(w))
            out += s->word + "\tword\t" + std::to_string(s->sense_index) + "\t" + serialize_definition(s->definition) +
                   "\t" + s->english_gloss + "\n";
    return out;
}

void save_lexicon(const Lexicon& lex, const std::filesystem::path& path) { tsv::write_file(path, to_tsv(lex)); }

// ---------------------------------------------------------------------------

Taxonomy::Taxonomy(const std::vector<std::pair<ConceptId, std::optional<ConceptId>>>& links) {
    bool have_root = false;
    for (const auto& [child, parent] : links) {
        if (!parent_.emplace(child, parent).second)
            throw std::invalid_argument("concept listed twice: " + child.str());
        if (!parent) {
            if (have_root) throw std::invalid_argument("second root " + child.str() + " (first was " + root_.str() + ")");
            have_root = true;
            root_ = child;
        }
    }
    if (!links.empty() && !have_root) throw std::invalid_argument("taxonomy has no root");
    for (const auto& [child, parent] : links) {
        if (!parent) continue;
        if (!parent_.count(*parent))
            throw std::invalid_argument("parent " + parent->str() + " of " + child.str() + " is not in the taxonomy");
        children_[*parent].push_back(child);
    }
    for (auto& [_, kids] : children_) std::sort(kids.begin(), kids.end());
    // Every node must reach the root; a cycle would never get there.
    for (const auto& [start, _] : parent_) {
        ConceptId cur = start;
        std::size_t steps = 0;
        while (const auto& p = parent_.at(cur)) {
            cur = *p;
            if (++steps > parent_.size()) throw std::invalid_argument("cycle through " + start.str());
        }
    }
}

const std::optional<ConceptId>& Taxonomy::parent(const ConceptId& id) const {
    const auto it = parent_.find(id);
    if (it == parent_.end()) throw UnknownConcept(id);
    return it->second;
}

const std::vector<ConceptId>& Taxonomy::children(const ConceptId& id) const {
    if (!contains(id)) throw UnknownConcept(id);
    const auto it = children_.find(id);
    return it == children_.end() ? kNoConcepts : it->second;
}

std::vector<ConceptId> Taxonomy::concepts() const {
    std::vector<ConceptId> out;
    out.reserve(parent_.size());
    for (const auto& [id, _] : parent_) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

void Taxonomy::attach_words(const Lexicon& lex) {
    words_.clear();
    for (const auto& [id, _] : parent_)
        if (const auto& syn = lex.synset(id); !syn.empty()) words_[id] = syn;
}

const std::vector<std::string>& Taxonomy::attached_words(const ConceptId& id) const {
    const auto it = words_.find(id);
    return it == words_.end() ? kNoWords : it->second;
}

Taxonomy parse_taxonomy(std::string_view text, const std::string& source) {
    std::vector<std::pair<ConceptId, std::optional<ConceptId>>> links;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        if (tsv::trim(row).empty() || row.front() == '#') return;
        const auto cols = tsv::split(row);
        if (cols.size() != 2) throw LoadError(source, line, "expected 2 columns, found " + std::to_string(cols.size()));
        try {
            auto child = ConceptId::parse(tsv::trim(cols[0]));
            std::optional<ConceptId> parent;
            if (!tsv::trim(cols[1]).empty()) parent = ConceptId::parse(tsv::trim(cols[1]));
            links.emplace_back(std::move(child), std::move(parent));
        } catch (const ClassificationError& e) {
            throw LoadError(source, line, e.what());
        }
    });
    try {
        return Taxonomy(links);
    } catch (const std::invalid_argument& e) {
        throw LoadError(source, 0, e.what());
    }
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
    return parse_taxonomy(tsv::read_file(path), path.string());
}

bool is_under(const Taxonomy& tax, const ConceptId& c, const ConceptId& ancestor) {
    if (!tax.contains(ancestor)) throw UnknownConcept(ancestor);
    const std::optional<ConceptId>* cur = &tax.parent(c);
    if (c == ancestor) return true;
    while (*cur) {
        if (**cur == ancestor) return true;
        cur = &tax.parent(**cur);
    }
    return false;
}

// ---------------------------------------------------------------------------

std::uint64_t FrequencyTable::count(const std::string& word) const {
    const auto it = counts_.find(word);
    return it == counts_.end() ? 0 : it->second;
}

FrequencyTable parse_frequency(std::string_view text, const std::string& source) {
    FrequencyTable freq;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        if (tsv::trim(row).empty() || row.front() == '#') return;
        const auto cols = tsv::split(row);
        if (cols.size() != 2) throw LoadError(source, line, "expected 2 columns, found " + std::to_string(cols.size()));
        const auto n = parse_int(tsv::trim(cols[1]));
        if (!n || *n < 0) throw LoadError(source, line, "bad count '" + std::string(cols[1]) + "'");
        freq.set(std::string(tsv::trim(cols[0])), static_cast<std::uint64_t>(*n));
    });
    return freq;
}

FrequencyTable load_frequency(const std::filesystem::path& path) {
    return parse_frequency(tsv::read_file(path), path.string());
}

}  // namespace ehn
