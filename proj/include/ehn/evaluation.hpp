#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ehn/embedding.hpp"
#include "ehn/extraction.hpp"

namespace ehn {

/// (w1, w2, w3) plus the answer synset; same shape as an extracted analogy.
using AnalogyQuestion = Analogy;

enum class Coverage {
    AnyMember,  // w1, w2, w3 and at least one synset member in the vocabulary
    AllMembers  // w1, w2, w3 and every synset member in the vocabulary
};

bool is_covered(const Embedding& e, const AnalogyQuestion& q, Coverage coverage = Coverage::AnyMember);

/// 3CosAdd over raw vectors with cached row norms.
class AnalogySolver {
public:
    explicit AnalogySolver(const Embedding& e);

    /// Row maximizing cos(v3 + v2 - v1, row) over rows other than w1, w2, w3;
    /// the lowest row index wins ties. All three words must be in the
    /// vocabulary.
    std::optional<std::size_t> nearest(std::size_t w1, std::size_t w2, std::size_t w3) const;

    const Embedding& embedding() const noexcept { return e_; }

private:
    const Embedding& e_;
    std::vector<double> norm_;
};

/// Empty when the question is not covered.
std::optional<std::string> answer_question(const Embedding& e, const AnalogyQuestion& q,
                                           Coverage coverage = Coverage::AnyMember);

struct QuestionVerdict {
    bool covered = false;
    std::optional<std::string> answer;
    bool correct = false;
};

struct EvalOptions {
    Coverage coverage = Coverage::AnyMember;
    unsigned jobs = 1;
};

struct EvalReport {
    std::size_t total = 0;
    std::size_t covered = 0;
    std::size_t correct = 0;
    /// correct / covered; empty when nothing is covered.
    std::optional<double> accuracy;
    std::vector<QuestionVerdict> per_question;

    /// "accuracy=<x> covered=<n> total=<m>", accuracy "n/a" when undefined.
    std::string summary() const;
};

EvalReport evaluate(const Embedding& e, const std::vector<AnalogyQuestion>& questions, const EvalOptions& opts = {});

/// w1, w2, w3, synset, answer, verdict (correct|wrong|uncovered), then the
/// summary line.
std::string report_to_tsv(const std::vector<AnalogyQuestion>& questions, const EvalReport& report);

}  // namespace ehn
