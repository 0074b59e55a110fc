#include "ehn/extraction.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "ehn/parallel.hpp"
#include "ehn/tsv.hpp"

namespace ehn {

std::string ConceptAnalogy::key() const {
    return left.word + "#" + std::to_string(left.sense_index) + ":" + left.id.key() + "=" + right.word + "#" +
           std::to_string(right.sense_index) + ":" + right.id.key();
}

void ExtractionConfig::validate() const {
    if (expansion_depth_limit < 1) throw std::invalid_argument("expansion_depth_limit must be at least 1");
}

namespace {

std::string describe_path(const std::vector<ConceptId>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += " -> ";
        out += path[i].str();
    }
    return out;
}

}  // namespace

ExpansionCycle::ExpansionCycle(std::vector<ConceptId> path)
    : std::runtime_error("expansion cycle " + describe_path(path)), path_(std::move(path)) {}

DefGraph expand_definition(const DefGraph& def, const Lexicon& lex, int limit) {
    DefGraph g = def;
    std::vector<ConceptId> path;
    int replaced = 0;
    while (g.is_single_concept()) {
        const ConceptId c = g.node(0).id;
        const bool seen = std::find(path.begin(), path.end(), c) != path.end();
        path.push_back(c);
        if (seen) throw ExpansionCycle(std::move(path));
        if (replaced >= limit) break;
        const auto* entry = lex.find_concept(c);
        if (!entry || !entry->definition) break;
        g = *entry->definition;
        ++replaced;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Graph comparison

namespace {

constexpr int kMany = 2;  // two or more mismatches, or no correspondence at all

struct Outcome {
    int count = 0;
    NodeId a = 0;
    NodeId b = 0;
    bool concept_pair = false;

    static Outcome many() { return Outcome{kMany}; }

    void add(const Outcome& part) {
        if (count + part.count >= kMany) {
            count = kMany;
            return;
        }
        if (part.count == 1) {
            a = part.a;
            b = part.b;
            concept_pair = part.concept_pair;
        }
        count += part.count;
    }
};

bool carries_label(NodeKind k) { return k == NodeKind::Concept || k == NodeKind::Word; }

class Comparator {
public:
    Comparator(const DefGraph& a, const DefGraph& b, const CompareOptions& opts)
        : a_(a), b_(b), opts_(opts), keys_a_(a.size()), keys_b_(b.size()) {}

    Outcome run(NodeId u, NodeId v) {
        const auto& x = a_.node(u);
        const auto& y = b_.node(v);
        Outcome out;
        if (carries_label(x.kind) && carries_label(y.kind)) {
            const bool same = x.kind == y.kind && (x.kind == NodeKind::Concept ? x.id == y.id : x.text == y.text);
            if (!same) {
                out.count = 1;
                out.a = u;
                out.b = v;
                out.concept_pair = x.kind == NodeKind::Concept && y.kind == NodeKind::Concept;
            }
        } else if (x.kind != y.kind || (x.kind == NodeKind::Function && x.text != y.text)) {
            return Outcome::many();
        }

        Children ca = children(a_, u);
        Children cb = children(b_, v);
        if (ca.args.size() != cb.args.size() || ca.attrs.size() != cb.attrs.size()) return Outcome::many();

        if (opts_.unordered_args) {
            out.add(match(ca.args, cb.args));
        } else {
            for (std::size_t k = 0; k < ca.args.size() && out.count < kMany; ++k) out.add(run(ca.args[k], cb.args[k]));
        }
        auto ia = ca.attrs.begin();
        auto ib = cb.attrs.begin();
        for (; ia != ca.attrs.end() && out.count < kMany; ++ia, ++ib) {
            if (ia->first != ib->first || ia->second.size() != ib->second.size()) return Outcome::many();
            out.add(match(ia->second, ib->second));
        }
        return out;
    }

private:
    struct Children {
        std::vector<NodeId> args;                              // by index
        std::map<std::string, std::vector<NodeId>> attrs;      // by label
    };

    static Children children(const DefGraph& g, NodeId n) {
        Children c;
        std::vector<std::pair<std::size_t, NodeId>> args;
        for (auto ei : g.out_edges(n)) {
            const auto& e = g.edges()[ei];
            if (e.edge.kind == EdgeKind::Arg)
                args.emplace_back(e.edge.index, e.target);
            else
                c.attrs[e.edge.label].push_back(e.target);
        }
        std::sort(args.begin(), args.end());
        for (const auto& [_, t] : args) c.args.push_back(t);
        return c;
    }

    const std::string& key(const DefGraph& g, std::vector<std::optional<std::string>>& cache, NodeId n) {
        if (!cache[n]) cache[n] = canonical_key(g, n, KeyOptions{opts_.unordered_args, std::nullopt, false});
        return *cache[n];
    }

    // Best correspondence between two equally sized child multisets: equal
    // subtrees pair up first; whatever is left must be a single pair.
    Outcome match(const std::vector<NodeId>& left, const std::vector<NodeId>& right) {
        if (left.size() == 1) return run(left[0], right[0]);
        std::vector<std::pair<std::string, NodeId>> l, r;
        for (auto n : left) l.emplace_back(key(a_, keys_a_, n), n);
        for (auto n : right) r.emplace_back(key(b_, keys_b_, n), n);
        std::sort(l.begin(), l.end());
        std::sort(r.begin(), r.end());
        std::vector<NodeId> rest_l, rest_r;
        std::size_t i = 0, j = 0;
        while (i < l.size() || j < r.size()) {
            if (i < l.size() && j < r.size() && l[i].first == r[j].first) {
                ++i;
                ++j;
            } else if (j == r.size() || (i < l.size() && l[i].first < r[j].first)) {
                rest_l.push_back(l[i++].second);
            } else {
                rest_r.push_back(r[j++].second);
            }
        }
        if (rest_l.empty()) return {};
        if (rest_l.size() == 1) return run(rest_l[0], rest_r[0]);
        return Outcome::many();
    }

    const DefGraph& a_;
    const DefGraph& b_;
    CompareOptions opts_;
    std::vector<std::optional<std::string>> keys_a_;
    std::vector<std::optional<std::string>> keys_b_;
};

}  // namespace

std::optional<GraphDiff> compare_graphs(const DefGraph& a, const DefGraph& b, const CompareOptions& opts) {
    if (a.empty() || b.empty() || a.size() != b.size()) return std::nullopt;
    const Outcome out = Comparator(a, b, opts).run(a.root(), b.root());
    if (out.count != 1 || !out.concept_pair) return std::nullopt;
    return GraphDiff{out.a, out.b, a.node(out.a).id, b.node(out.b).id};
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct PreparedSense {
    const Sense* sense = nullptr;
    DefGraph graph;
    bool usable = false;
    std::string error;
    std::vector<std::string> keys;  // one per concept node, that node wildcarded
};

}  // namespace

ExtractionResult extract_analogies(const Lexicon& lex, const Taxonomy& tax, const FrequencyTable& freq,
                                   const ExtractionConfig& cfg, const VerdictFilter* verdicts) {
    cfg.validate();
    if (cfg.concrete_root && !tax.contains(*cfg.concrete_root))
        throw std::invalid_argument("concrete root " + cfg.concrete_root->str() + " is not in the taxonomy");

    ExtractionResult result;
    auto& report = result.report;
    const auto& senses = lex.senses();
    report.senses = senses.size();

    // 1. Expand every sense and index it by each one-node-wildcarded key.
    std::vector<PreparedSense> prepared(senses.size());
    parallel_for(senses.size(), cfg.jobs, [&](std::size_t i) {
        auto& p = prepared[i];
        p.sense = &senses[i];
        try {
            p.graph = expand_definition(senses[i], lex, cfg.expansion_depth_limit);
        } catch (const ExpansionCycle& e) {
            p.error = e.what();
            return;
        }
        if (p.graph.size() < 2) return;
        p.usable = true;
        for (NodeId n = 0; n < p.graph.size(); ++n)
            if (p.graph.node(n).is_concept())
                p.keys.push_back(canonical_key(p.graph, KeyOptions{cfg.unordered_function_args, n, false}));
    });
    for (const auto& p : prepared) {
        if (!p.error.empty()) {
            ++report.senses_skipped;
            report.skipped.push_back(p.sense->tag() + ": " + p.error + " (all pairs with this sense skipped)");
        } else if (!p.usable) {
            ++report.senses_trivial;
        }
    }

    // 2. Senses sharing a wildcard key differ in at most that node; only
    //    those pairs go to the full comparison.
    std::unordered_map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < prepared.size(); ++i)
        for (const auto& k : prepared[i].keys) buckets[k].push_back(i);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (auto& [_, members] : buckets) {
        if (members.size() < 2) continue;
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y)
                if (senses[members[x]].word != senses[members[y]].word) pairs.emplace_back(members[x], members[y]);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<std::optional<ConceptAnalogy>> hits(pairs.size());
    const CompareOptions copts{cfg.unordered_function_args};
    parallel_for(pairs.size(), cfg.jobs, [&](std::size_t k) {
        auto [i, j] = pairs[k];
        if (senses[j].word < senses[i].word) std::swap(i, j);
        const auto diff = compare_graphs(prepared[i].graph, prepared[j].graph, copts);
        if (!diff) return;
        hits[k] = ConceptAnalogy{SenseConcept{senses[i].word, senses[i].sense_index, diff->left},
                                 SenseConcept{senses[j].word, senses[j].sense_index, diff->right}};
    });
    std::vector<std::pair<ConceptAnalogy, std::pair<std::size_t, std::size_t>>> candidates;
    for (std::size_t k = 0; k < hits.size(); ++k)
        if (hits[k]) candidates.emplace_back(std::move(*hits[k]), pairs[k]);
    report.candidates = candidates.size();

    // 3. Filters.
    auto concrete = [&](const ConceptId& c) {
        return !cfg.concrete_root || (tax.contains(c) && is_under(tax, c, *cfg.concrete_root));
    };
    auto concrete_sense = [&](const PreparedSense& p) {
        const auto& head = p.graph.node(p.graph.root());
        return head.is_concept() && concrete(head.id);
    };
    auto common = [&](const std::string& w) { return is_common(freq, w, cfg.min_freq); };
    auto any_common = [&](const ConceptId& c) {
        const auto& syn = lex.synset(c);
        return std::any_of(syn.begin(), syn.end(), common);
    };

    std::vector<ConceptAnalogy> kept;
    for (const auto& [ca, senses_pair] : candidates) {
        const auto& [i, j] = senses_pair;
        if (!concrete(ca.left.id) || !concrete(ca.right.id) || !concrete_sense(prepared[i]) ||
            !concrete_sense(prepared[j]))
            continue;
        ++report.after_concrete;
        if (!common(ca.left.word) || !common(ca.right.word) || !any_common(ca.left.id) || !any_common(ca.right.id))
            continue;
        ++report.after_frequency;
        kept.push_back(ca);
    }
    std::sort(kept.begin(), kept.end());
    result.concept_analogies = kept;

    if (verdicts && verdicts->keep_analogy)
        kept.erase(std::remove_if(kept.begin(), kept.end(), [&](const ConceptAnalogy& ca) { return !verdicts->keep_analogy(ca); }),
                   kept.end());
    report.after_verdicts = kept.size();

    // 4. Left expansion into questions, right expansion into answer synsets.
    auto expand = [&](const ConceptId& c) {
        std::vector<std::string> words;
        for (const auto& w : lex.synset(c)) {
            if (!common(w)) continue;
            if (verdicts && verdicts->keep_word && !verdicts->keep_word(c, w)) continue;
            words.push_back(w);
        }
        return words;
    };
    std::vector<Analogy>& out = result.analogies;
    for (const auto& ca : kept) {
        const auto answers = expand(ca.right.id);
        if (answers.empty()) continue;
        for (const auto& w2 : expand(ca.left.id)) {
            if (w2 == ca.left.word || w2 == ca.right.word) continue;
            out.push_back(Analogy{ca.left.word, w2, ca.right.word, answers});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    report.analogies = out.size();
    return result;
}

std::string ExtractionReport::to_text(const ExtractionConfig& cfg) const {
    std::ostringstream os;
    auto ratio = [](std::size_t part, std::size_t whole) {
        std::ostringstream r;
        r.setf(std::ios::fixed);
        r.precision(3);
        if (whole == 0)
            r << "n/a";
        else
            r << static_cast<double>(part) / static_cast<double>(whole);
        return r.str();
    };
    os << "concrete_root\t" << (cfg.concrete_root ? cfg.concrete_root->str() : "(none)") << "\n";
    os << "min_freq\t" << cfg.min_freq << "\n";
    os << "expansion_depth_limit\t" << cfg.expansion_depth_limit << "\n";
    os << "unordered_function_args\t" << (cfg.unordered_function_args ? "true" : "false") << "\n";
    os << "senses\t" << senses << "\n";
    os << "senses_trivial\t" << senses_trivial << "\n";
    os << "senses_skipped\t" << senses_skipped << "\n";
    os << "candidates\t" << candidates << "\n";
    os << "after_concrete\t" << after_concrete << "\tkept_ratio=" << ratio(after_concrete, candidates) << "\n";
    os << "after_frequency\t" << after_frequency << "\tkept_ratio=" << ratio(after_frequency, after_concrete) << "\n";
    os << "after_verdicts\t" << after_verdicts << "\tkept_ratio=" << ratio(after_verdicts, after_frequency) << "\n";
    os << "analogies\t" << analogies << "\n";
    os << "skipped\t" << skipped.size() << "\n";
    for (const auto& s : skipped) os << "  " << s << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Files

std::string analogies_to_tsv(const std::vector<Analogy>& analogies) {
    std::string out;
    for (const auto& a : analogies) out += a.w1 + "\t" + a.w2 + "\t" + a.w3 + "\t" + tsv::join(a.synset, "|") + "\n";
    return out;
}

std::vector<Analogy> parse_analogies(std::string_view text, const std::string& source) {
    std::vector<Analogy> out;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        const auto trimmed = tsv::trim(row);
        if (trimmed.empty() || trimmed.front() == ':' || trimmed.front() == '#') return;
        auto cols = row.find('\t') != std::string_view::npos ? tsv::split(trimmed) : tsv::split_whitespace(trimmed);
        if (cols.size() != 4) throw LoadError(source, line, "expected 4 columns, found " + std::to_string(cols.size()));
        Analogy a{std::string(tsv::trim(cols[0])), std::string(tsv::trim(cols[1])), std::string(tsv::trim(cols[2])), {}};
        for (auto m : tsv::split(tsv::trim(cols[3]), '|'))
            if (!tsv::trim(m).empty()) a.synset.emplace_back(tsv::trim(m));
        if (a.w1.empty() || a.w2.empty() || a.w3.empty() || a.synset.empty())
            throw LoadError(source, line, "empty field");
        std::sort(a.synset.begin(), a.synset.end());
        a.synset.erase(std::unique(a.synset.begin(), a.synset.end()), a.synset.end());
        out.push_back(std::move(a));
    });
    return out;
}

std::vector<Analogy> load_analogies(const std::filesystem::path& path) {
    return parse_analogies(tsv::read_file(path), path.string());
}

std::string concept_analogies_to_tsv(const std::vector<ConceptAnalogy>& cas) {
    std::string out;
    for (const auto& ca : cas)
        out += ca.left.word + "\t" + std::to_string(ca.left.sense_index) + "\t" + ca.left.id.str() + "\t" + ca.right.word +
               "\t" + std::to_string(ca.right.sense_index) + "\t" + ca.right.id.str() + "\n";
    return out;
}

std::vector<ConceptAnalogy> parse_concept_analogies(std::string_view text, const std::string& source) {
    std::vector<ConceptAnalogy> out;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        if (tsv::trim(row).empty() || row.front() == '#') return;
        const auto cols = tsv::split(row);
        if (cols.size() != 6) throw LoadError(source, line, "expected 6 columns, found " + std::to_string(cols.size()));
        auto index = [&](std::string_view s) {
            int v = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size() || v < 1)
                throw LoadError(source, line, "bad sense index '" + std::string(s) + "'");
            return v;
        };
        try {
            out.push_back(ConceptAnalogy{SenseConcept{std::string(cols[0]), index(cols[1]), ConceptId::parse(cols[2])},
                                         SenseConcept{std::string(cols[3]), index(cols[4]), ConceptId::parse(cols[5])}});
        } catch (const ClassificationError& e) {
            throw LoadError(source, line, e.what());
        }
    });
    return out;
}

std::vector<ConceptAnalogy> load_concept_analogies(const std::filesystem::path& path) {
    return parse_concept_analogies(tsv::read_file(path), path.string());
}

}  // namespace ehn
