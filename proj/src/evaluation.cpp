#include "ehn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ehn/parallel.hpp"
#include "ehn/tsv.hpp"

namespace ehn {

bool is_covered(const Embedding& e, const AnalogyQuestion& q, Coverage coverage) {
    if (!e.contains(q.w1) || !e.contains(q.w2) || !e.contains(q.w3)) return false;
    auto in_vocab = [&e](const std::string& w) { return e.contains(w); };
    return coverage == Coverage::AllMembers ? std::all_of(q.synset.begin(), q.synset.end(), in_vocab)
                                            : std::any_of(q.synset.begin(), q.synset.end(), in_vocab);
}

AnalogySolver::AnalogySolver(const Embedding& e) : e_(e), norm_(e.size()) {
    for (std::size_t r = 0; r < e.size(); ++r) {
        double sq = 0;
        for (double x : e.row(r)) sq += x * x;
        norm_[r] = std::sqrt(sq);
    }
}

std::optional<std::size_t> AnalogySolver::nearest(std::size_t w1, std::size_t w2, std::size_t w3) const {
    const std::size_t d = e_.dim();
    std::vector<double> target(d);
    const auto a = e_.row(w1), b = e_.row(w2), c = e_.row(w3);
    double sq = 0;
    for (std::size_t k = 0; k < d; ++k) {
        target[k] = c[k] + b[k] - a[k];
        sq += target[k] * target[k];
    }
    const double target_norm = std::sqrt(sq);

    std::optional<std::size_t> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < e_.size(); ++r) {
        if (r == w1 || r == w2 || r == w3) continue;
        const auto v = e_.row(r);
        double dot = 0;
        for (std::size_t k = 0; k < d; ++k) dot += target[k] * v[k];
        // cos(target, row) with both norms; exactly parallel rows score equal.
        const double score = (target_norm == 0 || norm_[r] == 0) ? 0.0 : dot / (target_norm * norm_[r]);
        if (!best || score > best_score) {
            best = r;
            best_score = score;
        }
    }
    return best;
}

std::optional<std::string> answer_question(const Embedding& e, const AnalogyQuestion& q, Coverage coverage) {
    if (!is_covered(e, q, coverage)) return std::nullopt;
    const AnalogySolver solver(e);
    const auto row = solver.nearest(*e.index_of(q.w1), *e.index_of(q.w2), *e.index_of(q.w3));
    if (!row) return std::nullopt;
    return e.word(*row);
}

EvalReport evaluate(const Embedding& e, const std::vector<AnalogyQuestion>& questions, const EvalOptions& opts) {
    EvalReport report;
    report.total = questions.size();
    report.per_question.resize(questions.size());
    const AnalogySolver solver(e);
    parallel_for(questions.size(), opts.jobs, [&](std::size_t i) {
        const auto& q = questions[i];
        auto& v = report.per_question[i];
        v.covered = is_covered(e, q, opts.coverage);
        if (!v.covered) return;
        const auto row = solver.nearest(*e.index_of(q.w1), *e.index_of(q.w2), *e.index_of(q.w3));
        if (!row) return;
        v.answer = e.word(*row);
        v.correct = std::find(q.synset.begin(), q.synset.end(), *v.answer) != q.synset.end();
    });
    for (const auto& v : report.per_question) {
        report.covered += v.covered;
        report.correct += v.correct;
    }
    if (report.covered > 0) report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.covered);
    return report;
}

std::string EvalReport::summary() const {
    std::string acc = "n/a";
    if (accuracy) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", *accuracy);
        acc = buf;
    }
    return "accuracy=" + acc + " covered=" + std::to_string(covered) + " total=" + std::to_string(total);
}

std::string report_to_tsv(const std::vector<AnalogyQuestion>& questions, const EvalReport& report) {
    std::string out;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const auto& q = questions[i];
        const auto& v = report.per_question.at(i);
        out += q.w1 + "\t" + q.w2 + "\t" + q.w3 + "\t" + tsv::join(q.synset, "|") + "\t" + v.answer.value_or("") + "\t" +
               (!v.covered ? "uncovered" : v.correct ? "correct" : "wrong") + "\n";
    }
    out += report.summary() + "\n";
    return out;
}

}  // namespace ehn
