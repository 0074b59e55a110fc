#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ehn {

/// Error raised while reading an input file; carries the 1-based line.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& path, std::size_t line, const std::string& what);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace tsv {

std::vector<std::string_view> split(std::string_view line, char sep = '\t');
std::vector<std::string_view> split_whitespace(std::string_view line);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Calls `fn(line_number, line)` for every line of a buffer, CR stripped.
void for_each_line(std::string_view text, const std::function<void(std::size_t, std::string_view)>& fn);

/// Whole file as bytes; throws LoadError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `content` atomically (temp file + rename).
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tsv
}  // namespace ehn
