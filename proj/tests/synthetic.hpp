#pragma once
// Seeded generators for the randomized checks.

#include <random>
#include <string>
#include <vector>

#include "ehn/embedding.hpp"
#include "ehn/evaluation.hpp"
#include "ehn/retrofit.hpp"

namespace synthetic {

inline ehn::Embedding random_embedding(std::mt19937_64& rng, std::size_t vocab, std::size_t dim,
                                       const std::string& prefix = "w") {
    std::normal_distribution<double> normal(0.0, 1.0);
    ehn::Embedding e(dim);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < vocab; ++i) {
        for (auto& x : v) x = normal(rng);
        e.add(prefix + std::to_string(i), v);
    }
    return e;
}

/// Questions over the embedding's words plus a few unknown ones, so that
/// some questions are not covered.
inline std::vector<ehn::Analogy> random_questions(std::mt19937_64& rng, const ehn::Embedding& e, std::size_t n) {
    std::vector<std::string> pool = e.words();
    for (int i = 0; i < 4; ++i) pool.push_back("oov" + std::to_string(i));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> size(1, 3);
    std::vector<ehn::Analogy> qs;
    while (qs.size() < n) {
        ehn::Analogy q{pool[pick(rng)], pool[pick(rng)], pool[pick(rng)], {}};
        if (q.w1 == q.w2 || q.w1 == q.w3 || q.w2 == q.w3) continue;
        for (int k = size(rng); k > 0; --k) q.synset.push_back(pool[pick(rng)]);
        std::sort(q.synset.begin(), q.synset.end());
        q.synset.erase(std::unique(q.synset.begin(), q.synset.end()), q.synset.end());
        qs.push_back(std::move(q));
    }
    return qs;
}

/// Integer vectors where w1:w2 = w3:answer holds exactly: a_i = e_i,
/// b_i = e_i + e_{d-1}. Every (a_i, b_i, a_j) question has b_j at cosine 1.
struct ExactBenchmark {
    ehn::Embedding embedding;
    std::vector<ehn::Analogy> questions;
};

inline ExactBenchmark exact_benchmark(std::size_t pairs) {
    const std::size_t d = pairs + 1;
    ExactBenchmark b{ehn::Embedding(d), {}};
    for (std::size_t i = 0; i < pairs; ++i) {
        std::vector<double> a(d, 0.0), v(d, 0.0);
        a[i] = 1;
        v[i] = 1;
        v[d - 1] = 1;
        b.embedding.add("a" + std::to_string(i), a);
        b.embedding.add("b" + std::to_string(i), v);
    }
    for (std::size_t i = 0; i < pairs; ++i)
        for (std::size_t j = 0; j < pairs; ++j)
            if (i != j)
                b.questions.push_back(ehn::Analogy{"a" + std::to_string(i), "b" + std::to_string(i),
                                                   "a" + std::to_string(j), {"b" + std::to_string(j)}});
    return b;
}

/// Words in clusters around shared concept vectors; each concept has a head
/// cluster near c_k and a tail cluster near c_k + r. Questions ask
/// head_k : tail_k = head_j : ? with the whole tail cluster of j as the
/// synset, and the knowledge graph joins every cluster into a clique.
struct GainTrial {
    ehn::Embedding embedding;
    ehn::KnowledgeGraph kg;
    std::vector<ehn::Analogy> questions;
};

inline GainTrial gain_trial(std::uint64_t seed, std::size_t concepts = 8, std::size_t per_cluster = 5,
                            std::size_t dim = 16, double noise = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&] {
        std::vector<double> v(dim);
        for (auto& x : v) x = normal(rng);
        return v;
    };
    const auto r = draw();
    GainTrial t{ehn::Embedding(dim), {}, {}};
    auto head = [](std::size_t k, std::size_t m) { return "h" + std::to_string(k) + "_" + std::to_string(m); };
    auto tail = [](std::size_t k, std::size_t m) { return "t" + std::to_string(k) + "_" + std::to_string(m); };
    for (std::size_t k = 0; k < concepts; ++k) {
        const auto c = draw();
        for (std::size_t m = 0; m < per_cluster; ++m) {
            auto h = draw(), u = draw();
            for (std::size_t i = 0; i < dim; ++i) {
                h[i] = c[i] + noise * h[i];
                u[i] = c[i] + r[i] + noise * u[i];
            }
            t.embedding.add(head(k, m), h);
            t.embedding.add(tail(k, m), u);
        }
        for (std::size_t m = 0; m < per_cluster; ++m)
            for (std::size_t n = m + 1; n < per_cluster; ++n) {
                t.kg.add(head(k, m), head(k, n), ehn::EdgeType::SameTaxon);
                t.kg.add(tail(k, m), tail(k, n), ehn::EdgeType::SameTaxon);
            }
    }
    for (std::size_t k = 0; k < concepts; ++k)
        for (std::size_t j = 0; j < concepts; ++j) {
            if (k == j) continue;
            std::vector<std::string> synset;
            for (std::size_t m = 0; m < per_cluster; ++m) synset.push_back(tail(j, m));
            std::sort(synset.begin(), synset.end());
            for (std::size_t m = 0; m < per_cluster; ++m)
                t.questions.push_back(ehn::Analogy{head(k, m), tail(k, m), head(j, m), synset});
        }
    return t;
}

/// Random retrofit instance: words r0.., a random edge set (some edges to
/// words outside the vocabulary), and per-word anchor weights.
struct RetrofitInstance {
    ehn::Embedding embedding;
    ehn::KnowledgeGraph kg;
    std::vector<std::pair<int, int>> edges;  // in-vocabulary, by row
    std::vector<double> alpha;
    ehn::RetrofitConfig cfg;
};

inline RetrofitInstance retrofit_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nwords(2, 20), ndim(1, 4);
    const int n = nwords(rng);
    const int d = ndim(rng);
    RetrofitInstance inst{random_embedding(rng, n, d, "r"), {}, {}, {}, {}};
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_int_distribution<int> nedges(0, 2 * n);
    for (int k = nedges(rng); k > 0; --k) {
        const int i = pick(rng), j = pick(rng);
        if (i == j) continue;
        if (inst.kg.add("r" + std::to_string(i), "r" + std::to_string(j),
                        k % 3 ? ehn::EdgeType::SameTaxon : ehn::EdgeType::HypoHyper))
            inst.edges.emplace_back(i, j);
    }
    inst.kg.add("r0", "missing", ehn::EdgeType::SameTaxon);
    std::uniform_real_distribution<double> alpha(0.25, 2.0);
    for (int i = 0; i < n; ++i) {
        inst.alpha.push_back(alpha(rng));
        inst.cfg.alpha_overrides["r" + std::to_string(i)] = inst.alpha.back();
    }
    return inst;
}

}  // namespace synthetic
