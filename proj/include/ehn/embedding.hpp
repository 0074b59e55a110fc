#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ehn {

/// Vocabulary plus a dense |V| x d row-major matrix. Rows remember the
/// text they were read from so that untouched rows are written back
/// byte-for-byte.
class Embedding {
public:
    Embedding() = default;
    explicit Embedding(std::size_t dim) : dim_(dim) {}

    /// Appends a row. Returns false, leaving the first row in place, when
    /// `word` is already present. Throws std::invalid_argument on a
    /// dimension mismatch.
    bool add(std::string word, std::span<const double> values);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }

    std::optional<std::size_t> index_of(const std::string& word) const;
    bool contains(const std::string& word) const { return index_.count(word) != 0; }
    const std::string& word(std::size_t row) const { return words_.at(row); }
    const std::vector<std::string>& words() const noexcept { return words_; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }
    /// Mutable access; the row is then written from its values, not its
    /// source text.
    std::span<double> row_mut(std::size_t r);

    bool had_header() const noexcept { return had_header_; }
    /// Components exactly as read, or empty when the row was built or modified.
    const std::string& source_text(std::size_t r) const { return source_text_.at(r); }

    /// Bit-exact equality of vocabulary order and values.
    friend bool operator==(const Embedding& a, const Embedding& b);

private:
    friend Embedding parse_embedding(std::string_view, const std::string&, std::vector<std::string>*);

    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> data_;
    std::vector<std::string> source_text_;  // original components, empty once modified
    bool had_header_ = false;
};

/// Whitespace-separated text: optional "V d" header line, then
/// "word x1 ... xd" per line. Duplicate words keep the first row and
/// all-zero rows are dropped, each with a warning.
/// Throws LoadError on an empty file, inconsistent dimension or a
/// non-numeric component.
Embedding parse_embedding(std::string_view text, const std::string& source = "<memory>",
                          std::vector<std::string>* warnings = nullptr);
Embedding load_embedding(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

std::string to_text(const Embedding& e);
void save_embedding(const Embedding& e, const std::filesystem::path& path);

}  // namespace ehn
