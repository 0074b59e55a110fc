#include "ehn/kappa.hpp"

#include <map>

namespace ehn {

namespace {

std::size_t check_shape(const LabelMatrix& labels) {
    if (labels.empty()) throw std::invalid_argument("no items");
    const std::size_t n = labels.front().size();
    if (n < 2) throw std::invalid_argument("every item needs at least two labels");
    for (const auto& row : labels)
        if (row.size() != n) throw std::invalid_argument("items carry different numbers of labels");
    return n;
}

}  // namespace

double fleiss_kappa(const LabelMatrix& labels) {
    const std::size_t n = check_shape(labels);
    const double N = static_cast<double>(labels.size());
    const double nd = static_cast<double>(n);

    std::map<std::string, double> totals;
    double p_bar = 0;
    bool unanimous = true;
    for (const auto& row : labels) {
        std::map<std::string, double> counts;
        for (const auto& l : row) counts[l] += 1;
        if (counts.size() != 1) unanimous = false;
        double sq = 0;
        for (const auto& [l, c] : counts) {
            sq += c * c;
            totals[l] += c;
        }
        p_bar += (sq - nd) / (nd * (nd - 1));
    }
    if (unanimous) return 1.0;
    p_bar /= N;

    double p_e = 0;
    for (const auto& [_, c] : totals) {
        const double p = c / (N * nd);
        p_e += p * p;
    }
    if (p_e >= 1.0) throw DegenerateAgreement("chance agreement is 1");
    return (p_bar - p_e) / (1.0 - p_e);
}

double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || a.size() != b.size()) throw std::invalid_argument("label columns must be non-empty and equal length");
    const double N = static_cast<double>(a.size());
    std::map<std::string, double> ca, cb;
    double agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[a[i]] += 1;
        cb[b[i]] += 1;
        if (a[i] == b[i]) agree += 1;
    }
    if (agree == N) return 1.0;
    const double p_o = agree / N;
    double p_e = 0;
    for (const auto& [l, c] : ca)
        if (const auto it = cb.find(l); it != cb.end()) p_e += (c / N) * (it->second / N);
    if (p_e >= 1.0) throw DegenerateAgreement("chance agreement is 1");
    return (p_o - p_e) / (1.0 - p_e);
}

double mean_pairwise_cohen(const LabelMatrix& labels) {
    const std::size_t n = check_shape(labels);
    double sum = 0;
    std::size_t pairs = 0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            std::vector<std::string> a, b;
            for (const auto& row : labels) {
                a.push_back(row[x]);
                b.push_back(row[y]);
            }
            sum += cohen_kappa(a, b);
            ++pairs;
        }
    return sum / static_cast<double>(pairs);
}

}  // namespace ehn
