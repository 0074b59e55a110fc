#pragma once
// Every single and double label edit of a small definition graph.

#include <string>
#include <vector>

#include "ehn/defgraph.hpp"

namespace perturb {

struct Edit {
    enum Kind { NodeLabel, EdgeLabel, ArgSwap } kind;
    std::size_t target;  // node id, edge index, or function node id
    ehn::DefNode node;   // NodeLabel
    std::string label;   // EdgeLabel
};

inline const std::vector<ehn::DefNode>& node_alphabet() {
    static const std::vector<ehn::DefNode> a{
        ehn::DefNode::make_concept(ehn::ConceptId::parse("wood|木")),
        ehn::DefNode::make_concept(ehn::ConceptId::parse("馬|horse")),
        ehn::DefNode::make_concept(ehn::ConceptId::parse("experiment|實驗")),
        ehn::DefNode::make_concept(ehn::ConceptId::parse("research|研究")),
        ehn::DefNode::make_concept(ehn::ConceptId::parse("HighQuality|優質")),
        ehn::DefNode::make_word("木頭"),
    };
    return a;
}

inline const std::vector<std::string>& edge_alphabet() {
    static const std::vector<std::string> a{"telic", "location", "qualification", "part"};
    return a;
}

/// Edits grouped by position; two edits at one position never combine.
inline std::vector<std::vector<Edit>> edits_by_position(const ehn::DefGraph& g) {
    std::vector<std::vector<Edit>> out;
    for (ehn::NodeId i = 0; i < g.size(); ++i) {
        const auto& n = g.node(i);
        if (n.kind == ehn::NodeKind::Concept || n.kind == ehn::NodeKind::Word) {
            std::vector<Edit> here;
            for (const auto& alt : node_alphabet())
                if (!(alt == n)) here.push_back(Edit{Edit::NodeLabel, i, alt, {}});
            out.push_back(std::move(here));
        } else if (n.kind == ehn::NodeKind::Function) {
            std::size_t args = 0;
            for (auto ei : g.out_edges(i)) args += g.edges()[ei].edge.kind == ehn::EdgeKind::Arg;
            if (args >= 2) out.push_back({Edit{Edit::ArgSwap, i, {}, {}}});
        }
    }
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        const auto& e = g.edges()[k].edge;
        if (e.kind != ehn::EdgeKind::Attribute) continue;
        std::vector<Edit> here;
        for (const auto& alt : edge_alphabet())
            if (alt != e.label) here.push_back(Edit{Edit::EdgeLabel, k, {}, alt});
        out.push_back(std::move(here));
    }
    return out;
}

inline ehn::DefGraph apply(const ehn::DefGraph& g, const std::vector<Edit>& edits) {
    auto nodes = g.nodes();
    auto edges = g.edges();
    for (const auto& e : edits) {
        switch (e.kind) {
            case Edit::NodeLabel: nodes[e.target] = e.node; break;
            case Edit::EdgeLabel: edges[e.target].edge.label = e.label; break;
            case Edit::ArgSwap:
                for (auto& x : edges)
                    if (x.source == e.target && x.edge.kind == ehn::EdgeKind::Arg && x.edge.index < 2)
                        x.edge.index = 1 - x.edge.index;
                break;
        }
    }
    ehn::DefGraph out;
    for (auto& n : nodes) out.add_node(n);
    for (auto& e : edges) out.add_edge(e.source, e.edge, e.target);
    out.set_root(g.root());
    return out;
}

/// All single edits, then all pairs of edits at distinct positions.
inline std::vector<ehn::DefGraph> all_perturbations(const ehn::DefGraph& g) {
    const auto pos = edits_by_position(g);
    std::vector<ehn::DefGraph> out;
    for (std::size_t p = 0; p < pos.size(); ++p)
        for (const auto& e : pos[p]) out.push_back(apply(g, {e}));
    for (std::size_t p = 0; p < pos.size(); ++p)
        for (std::size_t q = p + 1; q < pos.size(); ++q)
            for (const auto& e : pos[p])
                for (const auto& f : pos[q]) out.push_back(apply(g, {e, f}));
    return out;
}

/// Fixture graphs for the suite, each at most 7 nodes.
inline std::vector<std::string> fixture_definitions() {
    return {
        "{InstitutePlace|場所:telic={or({experiment|實驗:location={~}},{research|研究:location={~}})}}",
        "{wood|木:qualification={HighQuality|優質},telic={experiment|實驗:location={木頭}}}",
        "{馬|horse:part={wood|木},part={wood|木},part={research|研究:qualification={HighQuality|優質}},telic={木頭}}",
    };
}

}  // namespace perturb
