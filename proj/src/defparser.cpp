#include <string>

#include "ehn/defgraph.hpp"

namespace ehn {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + message), message_(message), offset_(offset) {}

namespace {

constexpr std::string_view kStructural = "{}():=,~";
constexpr int kMaxDepth = 256;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    DefGraph run() {
        skip_ws();
        const NodeId root = definition(true);
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected text after definition");
        graph_.set_root(root);
        return std::move(graph_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

    void skip_ws() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

    void expect(char c, const char* what) {
        skip_ws();
        if (pos_ >= text_.size()) fail(std::string("unexpected end of input, expected ") + what);
        if (text_[pos_] != c) fail(std::string("expected ") + what);
        ++pos_;
    }

    std::string_view token() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_]) && kStructural.find(text_[pos_]) == std::string_view::npos)
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    NodeId definition(bool is_root) {
        expect('{', "'{'");
        if (++depth_ > kMaxDepth) fail("definition nested too deeply");
        struct Leave {
            int& d;
            ~Leave() { --d; }
        } leave{depth_};
        skip_ws();
        const std::size_t head_at = pos_;
        NodeId head = 0;
        if (at('~')) {
            if (is_root) fail("self-reference cannot be the head of a definition");
            ++pos_;
            head = graph_.add_node(DefNode::self_ref());
            skip_ws();
            if (at(':')) fail("self-reference cannot carry attributes");
            expect('}', "'}'");
            return head;
        }
        const auto name = token();
        if (name.empty()) {
            if (pos_ >= text_.size()) fail("unexpected end of input, missing head");
            fail("missing head");
        }
        skip_ws();
        if (at('(')) {
            head = function(name, head_at);
        } else {
            TokenKind kind;
            try {
                kind = classify_token(name);
            } catch (const ClassificationError& e) {
                fail_at(e.what(), head_at);
            }
            if (kind == TokenKind::Attribute) fail_at("attribute '" + std::string(name) + "' used as a head", head_at);
            head = graph_.add_node(kind == TokenKind::Concept ? DefNode::make_concept(ConceptId::parse(name))
                                                              : DefNode::make_word(std::string(name)));
        }
        skip_ws();
        if (at(':')) {
            ++pos_;
            attributes(head);
        }
        expect('}', "'}'");
        return head;
    }

    NodeId function(std::string_view name, std::size_t name_at) {
        bool ok = false;
        try {
            ok = classify_token(name) == TokenKind::Attribute;
        } catch (const ClassificationError&) {
        }
        if (!ok) fail_at("function name must be Latin letters: '" + std::string(name) + "'", name_at);
        const NodeId fn = graph_.add_node(DefNode::make_function(std::string(name)));
        ++pos_;  // '('
        skip_ws();
        if (at(')')) fail("empty argument list");
        std::size_t index = 0;
        while (true) {
            skip_ws();
            if (!at('{')) {
                if (pos_ >= text_.size()) fail("unexpected end of input in argument list");
                fail("expected '{' to start a function argument");
            }
            const NodeId arg = definition(false);
            graph_.add_edge(fn, DefEdge::arg(index++), arg);
            skip_ws();
            if (at(',')) {
                ++pos_;
                continue;
            }
            expect(')', "')' or ','");
            return fn;
        }
    }

    void attributes(NodeId owner) {
        while (true) {
            skip_ws();
            const std::size_t attr_at = pos_;
            const auto attr = token();
            if (attr.empty()) {
                if (pos_ >= text_.size()) fail("unexpected end of input, expected attribute name");
                fail("expected attribute name");
            }
            bool ok = false;
            try {
                ok = classify_token(attr) == TokenKind::Attribute;
            } catch (const ClassificationError&) {
            }
            if (!ok) fail_at("not an attribute name: '" + std::string(attr) + "'", attr_at);
            skip_ws();
            if (!at('=')) fail("attribute '" + std::string(attr) + "' without '='");
            ++pos_;
            skip_ws();
            if (!at('{')) fail("attribute '" + std::string(attr) + "' without value");
            const NodeId value = definition(false);
            graph_.add_edge(owner, DefEdge::attribute(std::string(attr)), value);
            skip_ws();
            if (at(',')) {
                ++pos_;
                continue;
            }
            return;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    DefGraph graph_;
};

}  // namespace

DefGraph parse_definition(std::string_view text) { return Parser(text).run(); }

}  // namespace ehn
