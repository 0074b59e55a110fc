#include "ehn/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "ehn/tsv.hpp"

namespace ehn {

namespace {

const std::set<std::string> kPathKeys{"lexicon",    "taxonomy",    "frequency",  "embeddings", "kg",
                                      "benchmark",  "output_dir",  "session_dir", "static_dir", "verdicts"};

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T v{};
    const auto* end = value.data() + value.size();
    const auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || p != end) throw ConfigError(key + ": not a number: '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string unquote(std::string_view v) {
    v = tsv::trim(v);
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
        v = v.substr(1, v.size() - 2);
    return std::string(v);
}

std::string strip_comment(std::string_view line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return std::string(line.substr(0, i));
        }
    }
    return std::string(line);
}

std::string fmt_double(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
}

}  // namespace

void Config::set(const std::string& key, const std::string& value, const std::filesystem::path& base) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);

    if (section.empty() && name == "seed") {
        seed = parse_number<std::uint64_t>(key, value);
    } else if (section.empty() && name == "jobs") {
        jobs = parse_number<unsigned>(key, value);
    } else if (section == "paths") {
        if (!kPathKeys.count(name)) throw ConfigError("unknown path key '" + name + "'");
        if (value.empty()) throw ConfigError(key + ": empty path");
        const std::filesystem::path p(value);
        paths[name] = p.is_relative() && !base.empty() ? base / p : p;
    } else if (section == "extraction") {
        if (name == "concrete_root") {
            if (value.empty() || value == "none") {
                extraction.concrete_root.reset();
            } else {
                try {
                    extraction.concrete_root = ConceptId::parse(value);
                } catch (const ClassificationError& e) {
                    throw ConfigError(key + ": " + e.what());
                }
            }
        } else if (name == "min_freq") {
            extraction.min_freq = parse_number<std::uint64_t>(key, value);
        } else if (name == "expansion_depth_limit") {
            extraction.expansion_depth_limit = parse_number<int>(key, value);
        } else if (name == "unordered_function_args") {
            extraction.unordered_function_args = parse_bool(key, value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    } else if (section == "evaluation") {
        if (name != "coverage") throw ConfigError("unknown key '" + key + "'");
        if (value == "any")
            coverage = Coverage::AnyMember;
        else if (value == "all")
            coverage = Coverage::AllMembers;
        else
            throw ConfigError(key + ": expected any or all");
    } else if (section == "retrofit") {
        if (name == "alpha")
            retrofit.alpha = parse_number<double>(key, value);
        else if (name == "iterations")
            retrofit.iterations = parse_number<int>(key, value);
        else if (name == "convergence_eps")
            retrofit.convergence_eps = parse_number<double>(key, value);
        else if (name == "same_taxon_weight")
            retrofit.same_taxon_weight = parse_number<double>(key, value);
        else if (name == "hypo_hyper_weight")
            retrofit.hypo_hyper_weight = parse_number<double>(key, value);
        else
            throw ConfigError("unknown key '" + key + "'");
    } else if (section == "annotation") {
        if (name == "annotators") {
            annotators.clear();
            for (auto part : tsv::split(value, ','))
                if (const auto a = tsv::trim(part); !a.empty()) annotators.emplace_back(a);
        } else if (name == "snapshot_every") {
            snapshot_every = parse_number<std::size_t>(key, value);
        } else if (name == "unlabeled") {
            if (value == "permissive")
                verdict_policy.unlabeled = UnlabeledPolicy::Permissive;
            else if (value == "strict")
                verdict_policy.unlabeled = UnlabeledPolicy::Strict;
            else
                throw ConfigError(key + ": expected permissive or strict");
        } else if (name == "verdicts") {
            set("paths.verdicts", value, base);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    } else if (section == "server") {
        if (name == "host")
            host = value;
        else if (name == "port")
            port = parse_number<int>(key, value);
        else
            throw ConfigError("unknown key '" + key + "'");
        if (port < 0 || port > 65535) throw ConfigError("server.port out of range");
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

const std::filesystem::path& Config::path(const std::string& name) const {
    const auto it = paths.find(name);
    if (it == paths.end()) throw ConfigError("paths." + name + " is not set");
    return it->second;
}

std::string Config::to_text() const {
    std::ostringstream os;
    os << "seed = " << seed << "\n";
    os << "jobs = " << jobs << "\n";
    os << "\n[paths]\n";
    for (const auto& [k, p] : paths) os << k << " = \"" << p.string() << "\"\n";
    os << "\n[extraction]\n";
    os << "concrete_root = " << (extraction.concrete_root ? extraction.concrete_root->str() : "none") << "\n";
    os << "min_freq = " << extraction.min_freq << "\n";
    os << "expansion_depth_limit = " << extraction.expansion_depth_limit << "\n";
    os << "unordered_function_args = " << (extraction.unordered_function_args ? "true" : "false") << "\n";
    os << "\n[evaluation]\n";
    os << "coverage = " << (coverage == Coverage::AnyMember ? "any" : "all") << "\n";
    os << "\n[retrofit]\n";
    os << "alpha = " << fmt_double(retrofit.alpha) << "\n";
    os << "iterations = " << retrofit.iterations << "\n";
    os << "convergence_eps = " << fmt_double(retrofit.convergence_eps) << "\n";
    os << "same_taxon_weight = " << fmt_double(retrofit.same_taxon_weight) << "\n";
    os << "hypo_hyper_weight = " << fmt_double(retrofit.hypo_hyper_weight) << "\n";
    os << "\n[annotation]\n";
    os << "annotators = " << tsv::join(annotators, ",") << "\n";
    os << "snapshot_every = " << snapshot_every << "\n";
    os << "unlabeled = " << (verdict_policy.unlabeled == UnlabeledPolicy::Permissive ? "permissive" : "strict") << "\n";
    os << "\n[server]\n";
    os << "host = " << host << "\n";
    os << "port = " << port << "\n";
    return os.str();
}

Config parse_config(std::string_view text, const std::filesystem::path& base, const std::string& source) {
    Config cfg;
    std::string section;
    tsv::for_each_line(text, [&](std::size_t line, std::string_view raw) {
        const std::string stripped = strip_comment(raw);
        const auto row = tsv::trim(stripped);
        if (row.empty()) return;
        if (row.front() == '[') {
            if (row.back() != ']') throw LoadError(source, line, "unterminated section header");
            section = std::string(tsv::trim(row.substr(1, row.size() - 2)));
            return;
        }
        const auto eq = row.find('=');
        if (eq == std::string_view::npos) throw LoadError(source, line, "expected key = value");
        const std::string key(tsv::trim(row.substr(0, eq)));
        if (key.empty()) throw LoadError(source, line, "empty key");
        try {
            cfg.set(section.empty() ? key : section + "." + key, unquote(row.substr(eq + 1)), base);
        } catch (const ConfigError& e) {
            throw LoadError(source, line, e.what());
        }
    });
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    return parse_config(tsv::read_file(path), path.parent_path(), path.string());
}

}  // namespace ehn
