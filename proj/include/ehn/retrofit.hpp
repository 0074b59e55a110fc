#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ehn/embedding.hpp"
#include "ehn/lexicon.hpp"

namespace ehn {

enum class EdgeType : unsigned { SameTaxon = 1u, HypoHyper = 2u };

/// Undirected word graph; a pair seen with both edge types carries both tags.
class KnowledgeGraph {
public:
    /// Stores the pair in (min, max) order. Self-loops are ignored and
    /// reported by returning false.
    bool add(const std::string& a, const std::string& b, EdgeType type);

    /// (wa, wb) with wa < wb, mapped to a bitmask of EdgeType values.
    const std::map<std::pair<std::string, std::string>, unsigned>& edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return edges_.empty(); }
    bool has(const std::string& a, const std::string& b, EdgeType type) const;

    friend bool operator==(const KnowledgeGraph&, const KnowledgeGraph&) = default;

private:
    std::map<std::pair<std::string, std::string>, unsigned> edges_;
};

/// SameTaxon between words attached to one taxonomy node, HypoHyper between
/// the words of a node and the words of its parent.
KnowledgeGraph build_knowledge_graph(const Taxonomy& tax, const Lexicon& lex);

/// kg.tsv: word_a, word_b, same_taxon|hypo_hyper.
KnowledgeGraph parse_knowledge_graph(std::string_view tsv, const std::string& source = "<memory>");
KnowledgeGraph load_knowledge_graph(const std::filesystem::path& path);
std::string to_tsv(const KnowledgeGraph& kg);

struct RetrofitConfig {
    /// Anchor weight for words with an original vector, unless overridden.
    double alpha = 1.0;
    std::unordered_map<std::string, double> alpha_overrides;
    /// Edge weights w_ij by type; beta_ij = w_ij / sum_k w_ik, so with the
    /// defaults beta_ij = 1 / degree(i).
    double same_taxon_weight = 1.0;
    double hypo_hyper_weight = 1.0;
    int iterations = 10;
    /// Stop early once the mean per-word vector change of a pass drops below this.
    double convergence_eps = 1e-6;

    double alpha_for(const std::string& word) const;
    /// Throws std::invalid_argument.
    void validate() const;
};

struct RetrofitReport {
    double initial_objective = 0;
    std::vector<double> objective_per_pass;
    std::vector<double> mean_change_per_pass;
    int passes_run = 0;
    bool converged = false;
    std::size_t updated_words = 0;

    /// pass, objective, mean_change; pass 0 is the starting point.
    std::string to_tsv() const;
};

/// Gauss-Seidel retrofitting: rows are visited in ascending index order and
/// each word with in-vocabulary neighbours is set to
///   q_i = (alpha_i * qhat_i + sum_j beta_ij * q_j) / (alpha_i + sum_j beta_ij).
/// Words without such neighbours keep their vectors bit-for-bit.
/// `warm_start`, when given, supplies starting vectors (the anchors stay the
/// original ones); a dimension mismatch throws std::invalid_argument.
std::pair<Embedding, RetrofitReport> retrofit(const Embedding& original, const KnowledgeGraph& kg,
                                              const RetrofitConfig& cfg, const Embedding* warm_start = nullptr);

/// The quantity each update minimizes exactly in its own coordinate:
///   sum_i W_i alpha_i |q_i - qhat_i|^2 + sum_{edges ij} w_ij |q_i - q_j|^2,
/// W_i = sum_j w_ij over in-vocabulary neighbours. Non-increasing across
/// passes.
double retrofit_objective(const Embedding& original, const Embedding& current, const KnowledgeGraph& kg,
                          const RetrofitConfig& cfg);

}  // namespace ehn
