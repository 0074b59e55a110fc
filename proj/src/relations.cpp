#include "ehn/relations.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ehn {

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool DisjointSets::unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    return true;
}

std::vector<RelationClass> group_relations(const std::vector<Analogy>& analogies) {
    std::map<WordPair, std::size_t> ids;
    auto id_of = [&ids](WordPair p) { return ids.emplace(std::move(p), ids.size()).first->second; };

    std::vector<std::pair<std::size_t, std::size_t>> links;
    for (const auto& a : analogies) {
        const auto left = id_of({a.w1, a.w2});
        for (const auto& s : a.synset) links.emplace_back(left, id_of({a.w3, s}));
    }
    DisjointSets sets(ids.size());
    for (const auto& [x, y] : links) sets.unite(x, y);

    std::map<std::size_t, RelationClass> by_root;
    for (const auto& [pair, id] : ids) by_root[sets.find(id)].pairs.push_back(pair);  // map order keeps pairs sorted
    std::vector<RelationClass> out;
    out.reserve(by_root.size());
    for (auto& [_, cls] : by_root) out.push_back(std::move(cls));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.pairs.front() < y.pairs.front(); });
    return out;
}

std::string relations_to_tsv(const std::vector<RelationClass>& classes) {
    std::string out;
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (const auto& [a, b] : classes[i].pairs) out += std::to_string(i + 1) + "\t" + a + ":" + b + "\n";
    return out;
}

}  // namespace ehn
