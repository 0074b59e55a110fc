#pragma once

#include <cstddef>
#include <compare>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ehn {

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokenKind { Word, Concept, Attribute };

std::string_view to_string(TokenKind kind);

class ClassificationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Classifies an ontology token by its surface shape:
///   Word       no '|' and no Latin letters            (協, 實驗室)
///   Concept    exactly one '|' between an ASCII name with Latin letters
///              and a part with no Latin letters, either order  (help|幫助)
///   Attribute  Latin letters only                     (telic)
/// Throws ClassificationError for anything else.
TokenKind classify_token(std::string_view token);

/// Concept name with an English and a Chinese half. Equality, ordering and
/// hashing ignore which half was written first; the written order is kept
/// only so that text round-trips.
class ConceptId {
public:
    ConceptId() = default;
    ConceptId(std::string english, std::string chinese, bool chinese_first = false);

    /// Throws ClassificationError unless `token` is Concept-shaped.
    static ConceptId parse(std::string_view token);

    const std::string& english() const noexcept { return english_; }
    const std::string& chinese() const noexcept { return chinese_; }
    bool chinese_first() const noexcept { return chinese_first_; }
    bool empty() const noexcept { return english_.empty() && chinese_.empty(); }

    /// Written form, e.g. "馬|horse".
    std::string str() const;
    /// Order-normalized form "english|chinese"; equal ids have equal keys.
    std::string key() const;

    friend bool operator==(const ConceptId& a, const ConceptId& b) noexcept {
        return a.english_ == b.english_ && a.chinese_ == b.chinese_;
    }
    friend std::strong_ordering operator<=>(const ConceptId& a, const ConceptId& b) noexcept {
        if (auto c = a.english_ <=> b.english_; c != 0) return c;
        return a.chinese_ <=> b.chinese_;
    }

private:
    std::string english_;
    std::string chinese_;
    bool chinese_first_ = false;
};

struct ConceptIdHash {
    std::size_t operator()(const ConceptId& c) const noexcept;
};

// ---------------------------------------------------------------------------
// Definition graphs
// ---------------------------------------------------------------------------

using NodeId = std::size_t;

enum class NodeKind { Concept, Word, Function, SelfRef };

struct DefNode {
    NodeKind kind = NodeKind::SelfRef;
    ConceptId id;      // NodeKind::Concept
    std::string text;   // word surface or function name

    static DefNode make_concept(ConceptId id);
    static DefNode make_word(std::string surface);
    static DefNode make_function(std::string name);
    static DefNode self_ref();

    bool is_concept() const noexcept { return kind == NodeKind::Concept; }
    /// Human-readable label: concept written form, word, "or()", "~".
    std::string label() const;

    friend bool operator==(const DefNode& a, const DefNode& b) noexcept {
        return a.kind == b.kind && a.id == b.id && a.text == b.text;
    }
};

enum class EdgeKind { Attribute, Arg };

struct DefEdge {
    EdgeKind kind = EdgeKind::Attribute;
    std::string label;      // EdgeKind::Attribute
    std::size_t index = 0;  // EdgeKind::Arg, 0-based

    static DefEdge attribute(std::string label);
    static DefEdge arg(std::size_t index);

    friend bool operator==(const DefEdge&, const DefEdge&) = default;
};

struct Edge {
    NodeId source = 0;
    DefEdge edge;
    NodeId target = 0;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rooted, edge-labeled tree parsed from a structured definition. A "~" in
/// the text becomes a SelfRef leaf, so graphs never contain back-edges.
class DefGraph {
public:
    NodeId add_node(DefNode node);
    void add_edge(NodeId source, DefEdge edge, NodeId target);
    void set_root(NodeId root) { root_ = root; }

    const std::vector<DefNode>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const DefNode& node(NodeId id) const { return nodes_.at(id); }
    NodeId root() const noexcept { return root_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    /// Indices into edges() of the edges leaving `id`, in insertion order.
    const std::vector<std::size_t>& out_edges(NodeId id) const { return out_.at(id); }

    /// A single ConceptNode and nothing else (a "trivial" definition).
    bool is_single_concept() const noexcept;

    /// Throws GraphError describing the first violated structural invariant.
    void validate() const;

    /// Structural equality: same tree up to attribute-child order, with
    /// concept ids compared order-insensitively.
    friend bool operator==(const DefGraph& a, const DefGraph& b);

private:
    std::vector<DefNode> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> out_;
    NodeId root_ = 0;
};

/// Parse failure with the byte offset where it was detected.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset);

    std::size_t offset() const noexcept { return offset_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t offset_;
};

/// Grammar (whitespace between tokens ignored):
///   Definition := "{" Head (":" Attr "=" Definition ("," Attr "=" Definition)*)? "}"
///   Head       := Concept | Word | Function | "~"
///   Function   := name "(" Definition ("," Definition)* ")"
/// Nodes are numbered in pre-order; the head of the outer definition is 0.
DefGraph parse_definition(std::string_view text);

/// Canonical text: concept halves in written order, attributes sorted by
/// label (then by value text), function arguments in index order, no spaces.
/// Throws GraphError for graphs that fail validate().
std::string serialize_definition(const DefGraph& g);

struct KeyOptions {
    /// Treat function arguments as an unordered multiset.
    bool unordered_args = false;
    /// Replace the label of this node with "*".
    std::optional<NodeId> wildcard;
    /// Replace every Concept/Word label with "*" (pure shape).
    bool shape_only = false;
};

/// Order-normalized key of the subtree under `node`. Two graphs are
/// structurally equal iff their root keys are equal.
std::string canonical_key(const DefGraph& g, NodeId node, const KeyOptions& opts = {});
std::string canonical_key(const DefGraph& g, const KeyOptions& opts = {});

/// Plain node/edge listing, one item per line.
std::string render_listing(const DefGraph& g);
/// Graphviz dot.
std::string render_dot(const DefGraph& g, std::string_view name = "definition");

}  // namespace ehn
