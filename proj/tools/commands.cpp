#include "commands.hpp"

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "ehn/annotation.hpp"
#include "ehn/annotation_server.hpp"
#include "ehn/config.hpp"
#include "ehn/embedding.hpp"
#include "ehn/evaluation.hpp"
#include "ehn/extraction.hpp"
#include "ehn/lexicon.hpp"
#include "ehn/relations.hpp"
#include "ehn/retrofit.hpp"
#include "ehn/tsv.hpp"

namespace ehn::cli {

namespace {

class CliError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::vector<std::string> overrides;  // section.key=value
    std::map<std::string, std::string> path_flags;
};

Config effective_config(const Globals& g) {
    Config cfg;
    if (!g.config_path.empty()) {
        if (!std::filesystem::exists(g.config_path)) throw CliError("config file not found: " + g.config_path);
        cfg = load_config(g.config_path);
    }
    for (const auto& o : g.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw CliError("--set expects key=value, got '" + o + "'");
        cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
    for (const auto& [name, value] : g.path_flags)
        if (!value.empty()) cfg.set("paths." + name, value);
    if (g.seed) cfg.seed = *g.seed;
    if (g.jobs) cfg.jobs = *g.jobs;
    cfg.extraction.jobs = cfg.jobs;
    return cfg;
}

/// Every named input must be configured and exist; checked before any work.
void require_inputs(const Config& cfg, std::initializer_list<const char*> names) {
    for (const char* name : names) {
        if (!cfg.has_path(name)) throw CliError(std::string("no ") + name + " path given (paths." + name + ")");
        const auto& p = cfg.path(name);
        if (!std::filesystem::exists(p)) throw CliError(std::string(name) + " not found: " + p.string());
    }
}

void require_optional_inputs(const Config& cfg, std::initializer_list<const char*> names) {
    for (const char* name : names)
        if (cfg.has_path(name) && !std::filesystem::exists(cfg.path(name)))
            throw CliError(std::string(name) + " not found: " + cfg.path(name).string());
}

std::filesystem::path output_dir(const Config& cfg) {
    return cfg.has_path("output_dir") ? cfg.path("output_dir") : std::filesystem::path(".");
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Commands -------------------------------------------------------------------

int cmd_parse(const std::string& text, const std::string& format) {
    std::string input = text;
    if (input == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        input = os.str();
    }
    try {
        const auto g = parse_definition(input);
        std::cout << (format == "dot" ? render_dot(g) : render_listing(g));
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.message() << " at byte " << e.offset() << "\n";
        return 1;
    }
    return 0;
}

ExtractionResult run_extraction(const Config& cfg, const Lexicon& lex, const Taxonomy& tax,
                                const FrequencyTable& freq, std::optional<VerdictBook>& book) {
    if (cfg.has_path("verdicts")) {
        const auto store = SessionStore::open(cfg.path("verdicts"));
        book = store->read([](const Session& s) { return collect_verdicts(s); });
    }
    if (book) {
        const auto filter = make_verdict_filter(*book, cfg.verdict_policy);
        return extract_analogies(lex, tax, freq, cfg.extraction, &filter);
    }
    return extract_analogies(lex, tax, freq, cfg.extraction);
}

int cmd_extract(const Config& cfg) {
    require_inputs(cfg, {"lexicon", "taxonomy", "frequency"});
    require_optional_inputs(cfg, {"verdicts"});
    cfg.extraction.validate();
    const auto lex = load_lexicon(cfg.path("lexicon"));
    const auto tax = load_taxonomy(cfg.path("taxonomy"));
    const auto freq = load_frequency(cfg.path("frequency"));
    std::optional<VerdictBook> book;
    const auto result = run_extraction(cfg, lex, tax, freq, book);

    const auto out = output_dir(cfg);
    tsv::write_file(out / "analogies.tsv", analogies_to_tsv(result.analogies));
    tsv::write_file(out / "concept_analogies.tsv", concept_analogies_to_tsv(result.concept_analogies));
    std::string report = "lexicon\t" + cfg.path("lexicon").string() + "\n";
    report += "verdicts\t" + (book ? cfg.path("verdicts").string() : std::string("(none)")) + "\n";
    report += result.report.to_text(cfg.extraction);
    tsv::write_file(out / "extraction_report.txt", report);
    for (const auto& s : result.report.skipped) std::cerr << "skipped: " << s << "\n";
    std::cerr << result.analogies.size() << " analogies, " << result.concept_analogies.size()
              << " concept analogies written to " << out.string() << "\n";
    return 0;
}

int cmd_evaluate(const Config& cfg, const std::string& output) {
    require_inputs(cfg, {"embeddings", "benchmark"});
    std::vector<std::string> warnings;
    const auto e = load_embedding(cfg.path("embeddings"), &warnings);
    print_warnings(warnings);
    const auto questions = load_analogies(cfg.path("benchmark"));
    const auto report = evaluate(e, questions, EvalOptions{cfg.coverage, cfg.jobs});
    const auto path = output.empty() ? output_dir(cfg) / "evaluation.tsv" : std::filesystem::path(output);
    tsv::write_file(path, report_to_tsv(questions, report));
    std::cout << report.summary() << "\n";
    return 0;
}

int cmd_retrofit(const Config& cfg, const std::string& output, const std::string& report_path,
                 const std::string& warm_start) {
    require_inputs(cfg, {"embeddings"});
    if (!cfg.has_path("kg")) require_inputs(cfg, {"lexicon", "taxonomy"});
    else require_inputs(cfg, {"kg"});
    if (!warm_start.empty() && !std::filesystem::exists(warm_start))
        throw CliError("warm start not found: " + warm_start);
    cfg.retrofit.validate();

    std::vector<std::string> warnings;
    const auto e = load_embedding(cfg.path("embeddings"), &warnings);
    print_warnings(warnings);
    const auto out = output_dir(cfg);
    KnowledgeGraph kg;
    if (cfg.has_path("kg")) {
        kg = load_knowledge_graph(cfg.path("kg"));
    } else {
        const auto lex = load_lexicon(cfg.path("lexicon"));
        kg = build_knowledge_graph(load_taxonomy(cfg.path("taxonomy")), lex);
        tsv::write_file(out / "kg.tsv", to_tsv(kg));
    }
    std::optional<Embedding> start;
    if (!warm_start.empty()) start = load_embedding(warm_start);
    const auto [result, report] = retrofit(e, kg, cfg.retrofit, start ? &*start : nullptr);

    save_embedding(result, output.empty() ? out / "retrofitted.txt" : std::filesystem::path(output));
    tsv::write_file(report_path.empty() ? out / "retrofit_report.tsv" : std::filesystem::path(report_path),
                    report.to_tsv());
    std::cerr << "retrofitted " << report.updated_words << " of " << e.size() << " words in " << report.passes_run
              << " passes" << (report.converged ? " (converged)" : "") << "\n";
    return 0;
}

int cmd_relations(const std::string& input, const std::string& output) {
    if (!std::filesystem::exists(input)) throw CliError("analogies not found: " + input);
    const auto classes = group_relations(load_analogies(input));
    const auto text = relations_to_tsv(classes);
    if (output.empty())
        std::cout << text;
    else
        tsv::write_file(output, text);
    std::cerr << classes.size() << " relation classes\n";
    return 0;
}

int cmd_stats(const Config& cfg) {
    require_inputs(cfg, {"lexicon"});
    require_optional_inputs(cfg, {"taxonomy", "frequency", "embeddings", "benchmark"});
    const auto lex = load_lexicon(cfg.path("lexicon"));
    std::size_t trivial = 0, functions = 0, selfrefs = 0, nodes = 0;
    for (const auto& s : lex.senses()) {
        trivial += s.definition.is_single_concept();
        nodes += s.definition.size();
        for (const auto& n : s.definition.nodes()) {
            functions += n.kind == NodeKind::Function;
            selfrefs += n.kind == NodeKind::SelfRef;
        }
    }
    std::cout << "words\t" << lex.words().size() << "\n";
    std::cout << "senses\t" << lex.senses().size() << "\n";
    std::cout << "senses_single_concept\t" << trivial << "\n";
    std::cout << "definition_nodes\t" << nodes << "\n";
    std::cout << "function_nodes\t" << functions << "\n";
    std::cout << "selfref_nodes\t" << selfrefs << "\n";
    std::cout << "concepts\t" << lex.concepts().size() << "\n";
    std::cout << "attributes\t" << lex.attributes().size() << "\n";
    if (cfg.has_path("taxonomy")) std::cout << "taxonomy_nodes\t" << load_taxonomy(cfg.path("taxonomy")).size() << "\n";
    if (cfg.has_path("frequency"))
        std::cout << "frequency_entries\t" << load_frequency(cfg.path("frequency")).size() << "\n";
    if (cfg.has_path("embeddings")) {
        const auto e = load_embedding(cfg.path("embeddings"));
        std::cout << "embedding_words\t" << e.size() << "\nembedding_dim\t" << e.dim() << "\n";
    }
    if (cfg.has_path("benchmark")) std::cout << "benchmark_questions\t" << load_analogies(cfg.path("benchmark")).size() << "\n";
    return 0;
}

/// Opens the session in session_dir, creating it from a fresh extraction
/// when none exists yet.
std::unique_ptr<SessionStore> open_or_create_session(const Config& cfg) {
    const auto dir = cfg.has_path("session_dir") ? cfg.path("session_dir") : output_dir(cfg) / "session";
    if (std::filesystem::exists(SessionStore::snapshot_path(dir))) return SessionStore::open(dir, cfg.snapshot_every);

    if (cfg.annotators.empty()) throw CliError("annotation.annotators is empty");
    const auto lex = load_lexicon(cfg.path("lexicon"));
    const auto tax = load_taxonomy(cfg.path("taxonomy"));
    const auto freq = load_frequency(cfg.path("frequency"));
    const auto result = extract_analogies(lex, tax, freq, cfg.extraction);
    auto tasks = build_tasks(lex, freq, result.concept_analogies, cfg.extraction);
    if (tasks.empty()) throw CliError("extraction produced nothing to annotate");
    std::cerr << "created session with " << tasks.size() << " tasks in " << dir.string() << "\n";
    return SessionStore::create(dir, Session::create(std::move(tasks), cfg.annotators, cfg.seed), cfg.snapshot_every);
}

int cmd_annotate_serve(const Config& cfg) {
    const auto dir = cfg.has_path("session_dir") ? cfg.path("session_dir") : output_dir(cfg) / "session";
    if (!std::filesystem::exists(SessionStore::snapshot_path(dir))) require_inputs(cfg, {"lexicon", "taxonomy", "frequency"});
    require_optional_inputs(cfg, {"static_dir"});

    // Signals go to a dedicated thread so shutdown runs outside a handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto store = open_or_create_session(cfg);
    ServerOptions opts;
    opts.host = cfg.host;
    opts.port = cfg.port;
    if (cfg.has_path("static_dir")) opts.static_dir = cfg.path("static_dir");
    AnnotationServer server(*store, opts);
    if (!server.bind()) {
        std::cerr << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
        return 1;
    }
    std::cerr << "listening on http://" << cfg.host << ":" << server.port() << "\n" << std::flush;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.run();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    store->flush();
    std::cerr << "session saved to " << store->dir().string() << "\n";
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Analogy extraction from a structured lexical ontology, embedding evaluation and retrofitting."};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "key = value configuration file");
    app.add_option("--seed", g.seed, "Random seed (overrides the config)");
    app.add_option("--jobs", g.jobs, "Worker threads, 0 for all cores (overrides the config)");
    app.add_option("--set", g.overrides, "Override a config key, e.g. --set extraction.min_freq=10 (repeatable)")
        ->allow_extra_args(false);
    auto path_flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
        std::string flag = "--" + name;
        for (auto& c : flag) if (c == '_') c = '-';
        sub->add_option(flag, g.path_flags[name], help);
    };

    std::string def_text, format = "listing";
    auto* parse = app.add_subcommand("parse", "Parse one definition and print its graph");
    parse->add_option("definition", def_text, "Definition text, or - for standard input")->required();
    parse->add_option("--format", format, "listing or dot")->check(CLI::IsMember({"listing", "dot"}));

    auto* extract = app.add_subcommand("extract", "Extract analogies from the lexicon");
    for (const auto* n : {"lexicon", "taxonomy", "frequency", "output_dir", "verdicts"}) path_flag(extract, n, "");
    std::optional<std::uint64_t> min_freq;
    extract->add_option("--min-freq", min_freq, "Minimum corpus frequency");

    std::string eval_output, coverage;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score an embedding on an analogy benchmark");
    for (const auto* n : {"embeddings", "benchmark", "output_dir"}) path_flag(evaluate_cmd, n, "");
    evaluate_cmd->add_option("--output", eval_output, "Per-question TSV (default output_dir/evaluation.tsv)");
    evaluate_cmd->add_option("--coverage", coverage, "any or all")->check(CLI::IsMember({"any", "all"}));

    std::string rf_output, rf_report, rf_warm;
    auto* retrofit_cmd = app.add_subcommand("retrofit", "Retrofit an embedding to a word graph");
    for (const auto* n : {"embeddings", "kg", "lexicon", "taxonomy", "output_dir"}) path_flag(retrofit_cmd, n, "");
    retrofit_cmd->add_option("--output", rf_output, "Retrofitted embedding (default output_dir/retrofitted.txt)");
    retrofit_cmd->add_option("--report", rf_report, "Objective per pass (default output_dir/retrofit_report.tsv)");
    retrofit_cmd->add_option("--warm-start", rf_warm, "Starting vectors");

    std::string rel_input, rel_output;
    auto* relations = app.add_subcommand("relations", "Group analogies into relation classes");
    relations->add_option("analogies", rel_input, "analogies.tsv")->required();
    relations->add_option("--output", rel_output, "Output TSV (default standard output)");

    std::optional<int> port;
    std::string host;
    auto* serve = app.add_subcommand("annotate-serve", "Serve the annotation interface");
    for (const auto* n : {"lexicon", "taxonomy", "frequency", "output_dir", "session_dir", "static_dir"})
        path_flag(serve, n, "");
    serve->add_option("--port", port, "Port, 0 for any free port");
    serve->add_option("--host", host, "Address to bind");

    auto* stats = app.add_subcommand("stats", "Summarize the configured inputs");
    for (const auto* n : {"lexicon", "taxonomy", "frequency", "embeddings", "benchmark"}) path_flag(stats, n, "");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (parse->parsed()) return cmd_parse(def_text, format);
        if (relations->parsed()) return cmd_relations(rel_input, rel_output);
        auto cfg = effective_config(g);
        if (extract->parsed()) {
            if (min_freq) cfg.extraction.min_freq = *min_freq;
            return cmd_extract(cfg);
        }
        if (evaluate_cmd->parsed()) {
            if (!coverage.empty()) cfg.set("evaluation.coverage", coverage);
            return cmd_evaluate(cfg, eval_output);
        }
        if (retrofit_cmd->parsed()) return cmd_retrofit(cfg, rf_output, rf_report, rf_warm);
        if (serve->parsed()) {
            if (port) cfg.set("server.port", std::to_string(*port));
            if (!host.empty()) cfg.host = host;
            return cmd_annotate_serve(cfg);
        }
        if (stats->parsed()) return cmd_stats(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace ehn::cli
