#include "ehn/retrofit.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ehn/tsv.hpp"

namespace ehn {

bool KnowledgeGraph::add(const std::string& a, const std::string& b, EdgeType type) {
    if (a == b) return false;
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    edges_[std::move(key)] |= static_cast<unsigned>(type);
    return true;
}

bool KnowledgeGraph::has(const std::string& a, const std::string& b, EdgeType type) const {
    const auto it = edges_.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    return it != edges_.end() && (it->second & static_cast<unsigned>(type));
}

KnowledgeGraph build_knowledge_graph(const Taxonomy& tax, const Lexicon& lex) {
    KnowledgeGraph kg;
    for (const auto& c : tax.concepts()) {
        const auto& words = lex.synset(c);
        for (std::size_t i = 0; i < words.size(); ++i)
            for (std::size_t j = i + 1; j < words.size(); ++j) kg.add(words[i], words[j], EdgeType::SameTaxon);
        if (const auto& parent = tax.parent(c))
            for (const auto& w : words)
                for (const auto& h : lex.synset(*parent)) kg.add(w, h, EdgeType::HypoHyper);
    }
    return kg;
}

KnowledgeGraph parse_knowledge_graph(std::string_view text, const std::string& source) {
    KnowledgeGraph kg;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        if (tsv::trim(row).empty() || row.front() == '#') return;
        const auto cols = tsv::split(row);
        if (cols.size() != 3) throw LoadError(source, line, "expected 3 columns, found " + std::to_string(cols.size()));
        const auto type = tsv::trim(cols[2]);
        EdgeType t;
        if (type == "same_taxon")
            t = EdgeType::SameTaxon;
        else if (type == "hypo_hyper")
            t = EdgeType::HypoHyper;
        else
            throw LoadError(source, line, "unknown edge type '" + std::string(type) + "'");
        kg.add(std::string(tsv::trim(cols[0])), std::string(tsv::trim(cols[1])), t);
    });
    return kg;
}

KnowledgeGraph load_knowledge_graph(const std::filesystem::path& path) {
    return parse_knowledge_graph(tsv::read_file(path), path.string());
}

std::string to_tsv(const KnowledgeGraph& kg) {
    std::string out;
    for (const auto& [pair, tags] : kg.edges()) {
        if (tags & static_cast<unsigned>(EdgeType::SameTaxon)) out += pair.first + "\t" + pair.second + "\tsame_taxon\n";
        if (tags & static_cast<unsigned>(EdgeType::HypoHyper)) out += pair.first + "\t" + pair.second + "\thypo_hyper\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

double RetrofitConfig::alpha_for(const std::string& word) const {
    const auto it = alpha_overrides.find(word);
    return it == alpha_overrides.end() ? alpha : it->second;
}

void RetrofitConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("retrofit iterations must be at least 1");
    if (!(alpha >= 0)) throw std::invalid_argument("alpha must be non-negative");
    for (const auto& [w, a] : alpha_overrides)
        if (!(a >= 0)) throw std::invalid_argument("alpha for '" + w + "' must be non-negative");
    if (!(same_taxon_weight > 0) || !(hypo_hyper_weight > 0))
        throw std::invalid_argument("edge weights must be positive");
    if (!(convergence_eps >= 0)) throw std::invalid_argument("convergence_eps must be non-negative");
}

namespace {

struct Neighbour {
    std::size_t row;
    double weight;
};

/// Adjacency over embedding rows; words outside the vocabulary drop out.
std::vector<std::vector<Neighbour>> adjacency(const Embedding& e, const KnowledgeGraph& kg, const RetrofitConfig& cfg) {
    std::vector<std::vector<Neighbour>> adj(e.size());
    for (const auto& [pair, tags] : kg.edges()) {
        const auto a = e.index_of(pair.first);
        const auto b = e.index_of(pair.second);
        if (!a || !b) continue;
        double w = 0;
        if (tags & static_cast<unsigned>(EdgeType::SameTaxon)) w = std::max(w, cfg.same_taxon_weight);
        if (tags & static_cast<unsigned>(EdgeType::HypoHyper)) w = std::max(w, cfg.hypo_hyper_weight);
        adj[*a].push_back({*b, w});
        adj[*b].push_back({*a, w});
    }
    return adj;
}

double objective(const Embedding& original, const Embedding& current, const std::vector<std::vector<Neighbour>>& adj,
                 const RetrofitConfig& cfg) {
    const std::size_t d = original.dim();
    double total = 0;
    for (std::size_t i = 0; i < adj.size(); ++i) {
        if (adj[i].empty()) continue;
        double weight_sum = 0;
        for (const auto& n : adj[i]) weight_sum += n.weight;
        const auto q = current.row(i);
        const auto qhat = original.row(i);
        double anchor = 0;
        for (std::size_t k = 0; k < d; ++k) anchor += (q[k] - qhat[k]) * (q[k] - qhat[k]);
        total += weight_sum * cfg.alpha_for(original.word(i)) * anchor;
        for (const auto& n : adj[i]) {
            if (n.row < i) continue;  // each undirected edge once
            const auto r = current.row(n.row);
            double sq = 0;
            for (std::size_t k = 0; k < d; ++k) sq += (q[k] - r[k]) * (q[k] - r[k]);
            total += n.weight * sq;
        }
    }
    return total;
}

}  // namespace

double retrofit_objective(const Embedding& original, const Embedding& current, const KnowledgeGraph& kg,
                          const RetrofitConfig& cfg) {
    if (original.dim() != current.dim() || original.words() != current.words())
        throw std::invalid_argument("embeddings do not share a vocabulary");
    return objective(original, current, adjacency(original, kg, cfg), cfg);
}

std::pair<Embedding, RetrofitReport> retrofit(const Embedding& original, const KnowledgeGraph& kg,
                                              const RetrofitConfig& cfg, const Embedding* warm_start) {
    cfg.validate();
    if (warm_start && warm_start->dim() != original.dim())
        throw std::invalid_argument("dimension mismatch: embedding has " + std::to_string(original.dim()) +
                                    ", starting vectors have " + std::to_string(warm_start->dim()));

    const std::size_t d = original.dim();
    const auto adj = adjacency(original, kg, cfg);
    Embedding out = original;
    RetrofitReport report;

    std::vector<double> alpha(original.size());
    std::vector<double> weight_sum(original.size(), 0);
    for (std::size_t i = 0; i < original.size(); ++i) {
        alpha[i] = cfg.alpha_for(original.word(i));
        for (const auto& n : adj[i]) weight_sum[i] += n.weight;
        if (!adj[i].empty()) ++report.updated_words;
    }
    if (warm_start) {
        for (std::size_t i = 0; i < original.size(); ++i) {
            if (adj[i].empty()) continue;
            if (const auto r = warm_start->index_of(original.word(i))) {
                const auto src = warm_start->row(*r);
                std::copy(src.begin(), src.end(), out.row_mut(i).begin());
            }
        }
    }

    report.initial_objective = objective(original, out, adj, cfg);
    std::vector<double> next(d);
    for (int pass = 0; pass < cfg.iterations; ++pass) {
        double change = 0;
        for (std::size_t i = 0; i < original.size(); ++i) {
            if (adj[i].empty()) continue;
            // beta_ij = w_ij / W_i, so sum_j beta_ij = 1.
            const auto qhat = original.row(i);
            for (std::size_t k = 0; k < d; ++k) next[k] = alpha[i] * qhat[k];
            for (const auto& n : adj[i]) {
                const auto qj = out.row(n.row);
                const double beta = n.weight / weight_sum[i];
                for (std::size_t k = 0; k < d; ++k) next[k] += beta * qj[k];
            }
            auto q = out.row_mut(i);
            double sq = 0;
            for (std::size_t k = 0; k < d; ++k) {
                const double v = next[k] / (alpha[i] + 1.0);
                sq += (v - q[k]) * (v - q[k]);
                q[k] = v;
            }
            change += std::sqrt(sq);
        }
        const double mean_change = report.updated_words ? change / static_cast<double>(report.updated_words) : 0.0;
        report.objective_per_pass.push_back(objective(original, out, adj, cfg));
        report.mean_change_per_pass.push_back(mean_change);
        report.passes_run = pass + 1;
        if (mean_change < cfg.convergence_eps) {
            report.converged = true;
            break;
        }
    }
    return {std::move(out), std::move(report)};
}

std::string RetrofitReport::to_tsv() const {
    std::string out = "pass\tobjective\tmean_change\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "0\t%.17g\t\n", initial_objective);
    out += buf;
    for (std::size_t p = 0; p < objective_per_pass.size(); ++p) {
        std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\n", p + 1, objective_per_pass[p], mean_change_per_pass[p]);
        out += buf;
    }
    return out;
}

}  // namespace ehn
