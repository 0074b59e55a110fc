#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ehn/extraction.hpp"

namespace ehn {

using WordPair = std::pair<std::string, std::string>;

/// Connected component of word pairs linked through shared analogies.
struct RelationClass {
    std::vector<WordPair> pairs;  // sorted
};

/// Disjoint sets over 0..n-1 with path halving and union by size.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n);

    std::size_t find(std::size_t x);
    /// Returns false when x and y were already joined.
    bool unite(std::size_t x, std::size_t y);
    std::size_t size() const noexcept { return parent_.size(); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

/// Every analogy w1:w2=w3:S links (w1,w2) with (w3,s) for each s in S.
/// Classes are returned sorted by their smallest pair.
std::vector<RelationClass> group_relations(const std::vector<Analogy>& analogies);

/// class_id<TAB>wa:wb, one line per pair, ids from 1.
std::string relations_to_tsv(const std::vector<RelationClass>& classes);

}  // namespace ehn
