#include "ehn/defgraph.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "ehn/unicode.hpp"

namespace ehn {

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Word: return "word";
        case TokenKind::Concept: return "concept";
        case TokenKind::Attribute: return "attribute";
    }
    return "?";
}

namespace {

bool has_space(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    });
}

bool english_half(std::string_view s) {
    return !s.empty() && unicode::is_ascii(s) && unicode::has_latin_letter(s);
}

bool chinese_half(std::string_view s) {
    return !s.empty() && !unicode::has_latin_letter(s);
}

}  // namespace

TokenKind classify_token(std::string_view token) {
    if (token.empty()) throw ClassificationError("empty token");
    if (has_space(token)) throw ClassificationError("token contains whitespace: '" + std::string(token) + "'");
    const auto bars = std::count(token.begin(), token.end(), '|');
    if (bars == 0) {
        if (unicode::all_latin_letters(token)) return TokenKind::Attribute;
        if (!unicode::has_latin_letter(token)) return TokenKind::Word;
        throw ClassificationError("mixed-script token without '|': '" + std::string(token) + "'");
    }
    if (bars == 1) {
        ConceptId::parse(token);
        return TokenKind::Concept;
    }
    throw ClassificationError("token has more than one '|': '" + std::string(token) + "'");
}

// ---------------------------------------------------------------------------

ConceptId::ConceptId(std::string english, std::string chinese, bool chinese_first)
    : english_(std::move(english)), chinese_(std::move(chinese)), chinese_first_(chinese_first) {}

ConceptId ConceptId::parse(std::string_view token) {
    const auto bar = token.find('|');
    if (token.empty() || bar == std::string_view::npos || token.find('|', bar + 1) != std::string_view::npos)
        throw ClassificationError("not a concept token: '" + std::string(token) + "'");
    const auto first = token.substr(0, bar);
    const auto second = token.substr(bar + 1);
    if (english_half(first) && chinese_half(second))
        return ConceptId(std::string(first), std::string(second), false);
    if (chinese_half(first) && english_half(second))
        return ConceptId(std::string(second), std::string(first), true);
    throw ClassificationError("concept token needs one ASCII Latin half and one non-Latin half: '" +
                              std::string(token) + "'");
}

std::string ConceptId::str() const {
    return chinese_first_ ? chinese_ + "|" + english_ : english_ + "|" + chinese_;
}

std::string ConceptId::key() const { return english_ + "|" + chinese_; }

std::size_t ConceptIdHash::operator()(const ConceptId& c) const noexcept {
    const std::size_t h = std::hash<std::string>{}(c.english());
    return h ^ (std::hash<std::string>{}(c.chinese()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

// ---------------------------------------------------------------------------

DefNode DefNode::make_concept(ConceptId id) {
    DefNode n;
    n.kind = NodeKind::Concept;
    n.id = std::move(id);
    return n;
}

DefNode DefNode::make_word(std::string surface) {
    DefNode n;
    n.kind = NodeKind::Word;
    n.text = std::move(surface);
    return n;
}

DefNode DefNode::make_function(std::string name) {
    DefNode n;
    n.kind = NodeKind::Function;
    n.text = std::move(name);
    return n;
}

DefNode DefNode::self_ref() { return DefNode{}; }

std::string DefNode::label() const {
    switch (kind) {
        case NodeKind::Concept: return id.str();
        case NodeKind::Word: return text;
        case NodeKind::Function: return text + "()";
        case NodeKind::SelfRef: return "~";
    }
    return {};
}

DefEdge DefEdge::attribute(std::string label) {
    DefEdge e;
    e.kind = EdgeKind::Attribute;
    e.label = std::move(label);
    return e;
}

DefEdge DefEdge::arg(std::size_t index) {
    DefEdge e;
    e.kind = EdgeKind::Arg;
    e.index = index;
    return e;
}

// ---------------------------------------------------------------------------

NodeId DefGraph::add_node(DefNode node) {
    nodes_.push_back(std::move(node));
    out_.emplace_back();
    return nodes_.size() - 1;
}

void DefGraph::add_edge(NodeId source, DefEdge edge, NodeId target) {
    if (source >= nodes_.size() || target >= nodes_.size())
        throw GraphError("edge endpoint out of range");
    out_[source].push_back(edges_.size());
    edges_.push_back(Edge{source, std::move(edge), target});
}

bool DefGraph::is_single_concept() const noexcept {
    return nodes_.size() == 1 && nodes_[0].kind == NodeKind::Concept;
}

void DefGraph::validate() const {
    if (nodes_.empty()) throw GraphError("empty graph");
    if (root_ >= nodes_.size()) throw GraphError("root out of range");
    if (nodes_[root_].kind == NodeKind::SelfRef) throw GraphError("self-reference at root");

    std::vector<int> indegree(nodes_.size(), 0);
    for (const auto& e : edges_) ++indegree[e.target];
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (i == root_ ? indegree[i] != 0 : indegree[i] != 1)
            throw GraphError("node " + std::to_string(i) + " (" + n.label() + ") is not a tree node");
        if (n.kind == NodeKind::Function && !unicode::all_latin_letters(n.text))
            throw GraphError("function name is not attribute-shaped: " + n.text);
        if (n.kind == NodeKind::SelfRef && !out_[i].empty())
            throw GraphError("self-reference with outgoing edges");
        std::vector<std::size_t> arg_indices;
        for (auto ei : out_[i]) {
            const auto& e = edges_[ei].edge;
            if (e.kind == EdgeKind::Arg) {
                if (n.kind != NodeKind::Function) throw GraphError("argument edge from a non-function node");
                arg_indices.push_back(e.index);
            } else if (!unicode::all_latin_letters(e.label)) {
                throw GraphError("attribute label is not attribute-shaped: " + e.label);
            }
        }
        if (n.kind == NodeKind::Function) {
            if (arg_indices.empty()) throw GraphError("function " + n.text + " has no arguments");
            std::sort(arg_indices.begin(), arg_indices.end());
            for (std::size_t k = 0; k < arg_indices.size(); ++k)
                if (arg_indices[k] != k) throw GraphError("function " + n.text + " argument indices not consecutive");
        }
    }

    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{root_};
    seen[root_] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (auto ei : out_[u]) {
            const NodeId v = edges_[ei].target;
            if (seen[v]) throw GraphError("cycle through node " + std::to_string(v));
            seen[v] = true;
            ++reached;
            stack.push_back(v);
        }
    }
    if (reached != nodes_.size()) throw GraphError("graph has nodes unreachable from the root");
}

bool operator==(const DefGraph& a, const DefGraph& b) {
    if (a.size() != b.size() || a.edges().size() != b.edges().size()) return false;
    if (a.empty()) return true;
    return canonical_key(a) == canonical_key(b);
}

// ---------------------------------------------------------------------------

namespace {

struct Emitter {
    const DefGraph& g;
    const KeyOptions* key;  // null when serializing

    std::string head(NodeId id) const {
        const auto& n = g.node(id);
        if (key) {
            if (key->wildcard && *key->wildcard == id) return "*";
            if (key->shape_only && (n.kind == NodeKind::Concept || n.kind == NodeKind::Word)) return "*";
            if (n.kind == NodeKind::Concept) return n.id.key();
            // Words and concepts share a namespace in keys; mark words so
            // "木" the word never collides with a concept.
            if (n.kind == NodeKind::Word) return "'" + n.text;
        } else if (n.kind == NodeKind::Concept) {
            return n.id.str();
        }
        if (n.kind == NodeKind::SelfRef) return "~";
        return n.text;
    }

    std::string emit(NodeId id) const {
        const auto& n = g.node(id);
        std::vector<std::pair<std::size_t, std::string>> args;
        std::vector<std::pair<std::string, std::string>> attrs;
        for (auto ei : g.out_edges(id)) {
            const auto& e = g.edges()[ei];
            if (e.edge.kind == EdgeKind::Arg)
                args.emplace_back(e.edge.index, emit(e.target));
            else
                attrs.emplace_back(e.edge.label, emit(e.target));
        }
        std::string out = "{";
        out += head(id);
        if (n.kind == NodeKind::Function) {
            if (key && key->unordered_args)
                std::sort(args.begin(), args.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
            else
                std::sort(args.begin(), args.end());
            out += "(";
            for (std::size_t k = 0; k < args.size(); ++k) {
                if (k) out += ",";
                out += args[k].second;
            }
            out += ")";
        }
        std::sort(attrs.begin(), attrs.end());
        for (std::size_t k = 0; k < attrs.size(); ++k) {
            out += k ? "," : ":";
            out += attrs[k].first;
            out += "=";
            out += attrs[k].second;
        }
        out += "}";
        return out;
    }
};

}  // namespace

std::string canonical_key(const DefGraph& g, NodeId node, const KeyOptions& opts) {
    return Emitter{g, &opts}.emit(node);
}

std::string canonical_key(const DefGraph& g, const KeyOptions& opts) {
    if (g.empty()) return {};
    return canonical_key(g, g.root(), opts);
}

std::string serialize_definition(const DefGraph& g) {
    g.validate();
    return Emitter{g, nullptr}.emit(g.root());
}

namespace {

std::string edge_label(const DefEdge& e) {
    return e.kind == EdgeKind::Arg ? "arg" + std::to_string(e.index) : e.label;
}

std::string_view kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Concept: return "concept";
        case NodeKind::Word: return "word";
        case NodeKind::Function: return "function";
        case NodeKind::SelfRef: return "selfref";
    }
    return "?";
}

/// Edges ordered by target; in a tree that is pre-order.
std::vector<const Edge*> edges_by_target(const DefGraph& g) {
    std::vector<const Edge*> out;
    for (const auto& e : g.edges()) out.push_back(&e);
    std::stable_sort(out.begin(), out.end(), [](const Edge* x, const Edge* y) { return x->target < y->target; });
    return out;
}

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string render_listing(const DefGraph& g) {
    std::ostringstream os;
    os << "nodes: " << g.size() << "\n";
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto& n = g.node(i);
        os << "  " << i << " " << kind_name(n.kind) << " " << n.label() << (i == g.root() ? " (root)" : "") << "\n";
    }
    os << "edges: " << g.edges().size() << "\n";
    for (const auto* e : edges_by_target(g))
        os << "  " << e->source << " -" << edge_label(e->edge) << "-> " << e->target << "\n";
    return os.str();
}

std::string render_dot(const DefGraph& g, std::string_view name) {
    std::ostringstream os;
    os << "digraph \"" << dot_escape(name) << "\" {\n";
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto& n = g.node(i);
        os << "  n" << i << " [label=\"" << dot_escape(n.label()) << "\"";
        if (n.kind == NodeKind::Function) os << ", shape=box";
        if (n.kind == NodeKind::SelfRef) os << ", shape=plaintext";
        if (i == g.root()) os << ", penwidth=2";
        os << "];\n";
    }
    for (const auto* e : edges_by_target(g))
        os << "  n" << e->source << " -> n" << e->target << " [label=\"" << dot_escape(edge_label(e->edge)) << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace ehn
