#include "ehn/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <stdexcept>

#include "ehn/tsv.hpp"

namespace ehn {

bool Embedding::add(std::string word, std::span<const double> values) {
    if (values.size() != dim_)
        throw std::invalid_argument("row for '" + word + "' has " + std::to_string(values.size()) +
                                    " components, expected " + std::to_string(dim_));
    if (index_.count(word)) return false;
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    data_.insert(data_.end(), values.begin(), values.end());
    source_text_.emplace_back();
    return true;
}

std::optional<std::size_t> Embedding::index_of(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<double> Embedding::row_mut(std::size_t r) {
    source_text_.at(r).clear();
    return {data_.data() + r * dim_, dim_};
}

bool operator==(const Embedding& a, const Embedding& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_ && a.data_.size() == b.data_.size() &&
           std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(double)) == 0;
}

namespace {

std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

bool is_count(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Embedding parse_embedding(std::string_view text, const std::string& source, std::vector<std::string>* warnings) {
    auto warn = [&](std::size_t line, const std::string& msg) {
        if (warnings) warnings->push_back(source + ":" + std::to_string(line) + ": " + msg);
    };
    Embedding e;
    bool first = true;
    bool have_dim = false;
    std::vector<double> values;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view row) {
        const auto tokens = tsv::split_whitespace(row);
        if (tokens.empty()) return;
        if (first) {
            first = false;
            if (tokens.size() == 2 && is_count(tokens[0]) && is_count(tokens[1])) {
                e.had_header_ = true;
                e.dim_ = std::stoul(std::string(tokens[1]));
                have_dim = true;
                return;
            }
        }
        if (!have_dim) {
            e.dim_ = tokens.size() - 1;
            have_dim = true;
        }
        if (tokens.size() - 1 != e.dim_)
            throw LoadError(source, line,
                            "expected " + std::to_string(e.dim_) + " components, found " + std::to_string(tokens.size() - 1));
        values.clear();
        bool nonzero = false;
        for (std::size_t k = 1; k < tokens.size(); ++k) {
            const auto v = parse_double(tokens[k]);
            if (!v) throw LoadError(source, line, "non-numeric component '" + std::string(tokens[k]) + "'");
            nonzero = nonzero || *v != 0.0;
            values.push_back(*v);
        }
        if (!nonzero) {
            warn(line, "all-zero vector for '" + std::string(tokens[0]) + "' dropped");
            return;
        }
        if (!e.add(std::string(tokens[0]), values)) {
            warn(line, "duplicate word '" + std::string(tokens[0]) + "', keeping the first row");
            return;
        }
        const auto body = row.substr(tokens[1].data() - row.data());
        e.source_text_.back() = std::string(tsv::trim(body));
    });
    if (e.empty()) throw LoadError(source, 0, "no vectors");
    if (e.dim_ == 0) throw LoadError(source, 0, "vectors have no components");
    return e;
}

Embedding load_embedding(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    return parse_embedding(tsv::read_file(path), path.string(), warnings);
}

std::string to_text(const Embedding& e) {
    std::string out;
    if (e.had_header()) out += std::to_string(e.size()) + " " + std::to_string(e.dim()) + "\n";
    char buf[64];
    for (std::size_t r = 0; r < e.size(); ++r) {
        out += e.word(r);
        out += ' ';
        if (const auto& src = e.source_text(r); !src.empty()) {
            out += src;
        } else {
            const auto v = e.row(r);
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (k) out += ' ';
                const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v[k]);
                out.append(buf, p);
            }
        }
        out += '\n';
    }
    return out;
}

void save_embedding(const Embedding& e, const std::filesystem::path& path) { tsv::write_file(path, to_text(e)); }

}  // namespace ehn
