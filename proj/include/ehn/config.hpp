#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ehn/annotation.hpp"
#include "ehn/evaluation.hpp"
#include "ehn/extraction.hpp"
#include "ehn/retrofit.hpp"

namespace ehn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Settings shared by all commands. The file is key = value lines grouped
/// under [section] headers; "#" starts a comment, values may be quoted.
/// Relative paths resolve against the file's directory.
///
///   seed, jobs
///   [paths]       lexicon taxonomy frequency embeddings kg benchmark
///                 output_dir session_dir static_dir
///   [extraction]  concrete_root min_freq expansion_depth_limit
///                 unordered_function_args
///   [evaluation]  coverage = any | all
///   [retrofit]    alpha iterations convergence_eps same_taxon_weight
///                 hypo_hyper_weight
///   [annotation]  annotators (comma separated) snapshot_every
///                 unlabeled = permissive | strict  verdicts (session dir)
///   [server]      host port
struct Config {
    std::map<std::string, std::filesystem::path> paths;

    std::uint64_t seed = 0;
    unsigned jobs = 1;
    ExtractionConfig extraction;
    Coverage coverage = Coverage::AnyMember;
    RetrofitConfig retrofit;
    std::vector<std::string> annotators;
    std::size_t snapshot_every = 50;
    VerdictPolicy verdict_policy;
    std::string host = "127.0.0.1";
    int port = 8080;

    /// Applies one "section.key" (or top-level "key") setting. Path values
    /// resolve against `base`. Throws ConfigError.
    void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});

    /// The path called `name`; throws ConfigError when unset.
    const std::filesystem::path& path(const std::string& name) const;
    bool has_path(const std::string& name) const { return paths.count(name) != 0; }

    /// Every effective setting as "key = value" lines; parsing the result
    /// gives back an equivalent Config.
    std::string to_text() const;
};

Config parse_config(std::string_view text, const std::filesystem::path& base = {},
                    const std::string& source = "<memory>");
Config load_config(const std::filesystem::path& path);

}  // namespace ehn
