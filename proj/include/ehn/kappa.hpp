#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ehn {

/// Rows are items, columns are the labels given by each annotator.
using LabelMatrix = std::vector<std::vector<std::string>>;

class DegenerateAgreement : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fleiss' kappa over items each labeled by the same n >= 2 annotators.
/// Exactly 1 whenever every item is unanimous. Throws std::invalid_argument
/// on an empty matrix or ragged rows, DegenerateAgreement when chance
/// agreement is 1 without complete agreement.
double fleiss_kappa(const LabelMatrix& labels);

/// Cohen's kappa for two label columns of equal length. Exactly 1 when the
/// columns agree everywhere; DegenerateAgreement when chance agreement is 1
/// otherwise.
double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Mean Cohen's kappa over every annotator pair (columns of `labels`).
double mean_pairwise_cohen(const LabelMatrix& labels);

}  // namespace ehn
