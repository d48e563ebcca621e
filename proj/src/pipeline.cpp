#include "litkg/pipeline.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include "litkg/error.hpp"
#include "litkg/rdf_ingest.hpp"

namespace litkg {

namespace {

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(std::string(key), "expected a boolean, got '" + std::string(v) + "'");
}

template <typename T>
T parse_num(std::string_view key, std::string_view v) {
    T value{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(v) + "'");
    }
    return value;
}

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
    const std::string v = trim(raw);
    try {
        if (key == "input") input = v;
        else if (key == "abstract-property") abstract_properties.push_back(v);
        else if (key == "label-property") label_property = v;
        else if (key == "lenient") lenient = parse_bool(key, v);
        else if (key == "match-predicates") match_predicates = parse_bool(key, v);
        else if (key == "dump-linked") dump_linked = parse_bool(key, v);
        else if (key == "include-predicates") ppr.include_predicates = parse_bool(key, v);
        else if (key == "ppr-alpha") ppr.restart_alpha = parse_num<double>(key, v);
        else if (key == "ppr-epsilon") ppr.epsilon = parse_num<double>(key, v);
        else if (key == "window") text.window = parse_num<std::size_t>(key, v);
        else if (key == "weighting") text.weighting = parse_weighting(v);
        else if (key == "min-word-count") text.min_word_count = parse_num<std::size_t>(key, v);
        else if (key == "kth") kth = parse_num<std::size_t>(key, v);
        else if (key == "kth-distinct") kth_mode = parse_bool(key, v) ? KthMode::Distinct : KthMode::Multiset;
        else if (key == "dims") glove.dims = parse_num<std::size_t>(key, v);
        else if (key == "iterations") glove.iterations = parse_num<std::size_t>(key, v);
        else if (key == "learning-rate") glove.learning_rate = parse_num<double>(key, v);
        else if (key == "x-max") glove.x_max = parse_num<double>(key, v);
        else if (key == "weight-exponent") glove.weight_exponent = parse_num<double>(key, v);
        else if (key == "seed") glove.seed = parse_num<std::uint64_t>(key, v);
        else if (key == "deterministic") glove.deterministic = parse_bool(key, v);
        else if (key == "combine") combine = parse_combine(v);
        else if (key == "threads") threads = parse_num<unsigned>(key, v);
        else throw ConfigError(std::string(key), "unknown configuration key");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string(key), e.what());
    }
}

void PipelineConfig::validate(bool check_paths) const {
    auto guard = [](const char* field, const auto& check) {
        try {
            check();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(field, e.what());
        }
    };
    if (check_paths) {
        if (input.empty()) throw ConfigError("input", "no input file given");
        if (!fs::is_regular_file(input)) throw ConfigError("input", "file does not exist: " + input);
    }
    if (abstract_properties.empty()) throw ConfigError("abstract-property", "at least one property is required");
    if (label_property.empty()) throw ConfigError("label-property", "must not be empty");
    if (kth < 1) throw ConfigError("kth", "must be at least 1");
    guard("ppr-alpha", [&] { ppr.validate(); });
    guard("window", [&] { text.validate(); });
    guard("dims", [&] { glove.validate(); });
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("input", input);
    for (const auto& p : abstract_properties) e.emplace_back("abstract-property", p);
    e.emplace_back("label-property", label_property);
    e.emplace_back("lenient", fmt(lenient));
    e.emplace_back("ppr-alpha", fmt(ppr.restart_alpha));
    e.emplace_back("ppr-epsilon", fmt(ppr.epsilon));
    e.emplace_back("include-predicates", fmt(ppr.include_predicates));
    e.emplace_back("match-predicates", fmt(match_predicates));
    e.emplace_back("window", std::to_string(text.window));
    e.emplace_back("weighting", std::string(to_string(text.weighting)));
    e.emplace_back("min-word-count", std::to_string(text.min_word_count));
    e.emplace_back("dump-linked", fmt(dump_linked));
    e.emplace_back("kth", std::to_string(kth));
    e.emplace_back("kth-distinct", fmt(kth_mode == KthMode::Distinct));
    e.emplace_back("dims", std::to_string(glove.dims));
    e.emplace_back("iterations", std::to_string(glove.iterations));
    e.emplace_back("learning-rate", fmt(glove.learning_rate));
    e.emplace_back("x-max", fmt(glove.x_max));
    e.emplace_back("weight-exponent", fmt(glove.weight_exponent));
    e.emplace_back("seed", std::to_string(glove.seed));
    e.emplace_back("deterministic", fmt(glove.deterministic));
    e.emplace_back("combine", std::string(to_string(combine)));
    return e;
}

void apply_config(PipelineConfig& cfg, std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool abstracts_replaced = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key == "abstract-property" && !abstracts_replaced) {
            cfg.abstract_properties.clear();
            abstracts_replaced = true;
        }
        cfg.set(key, value);
    }
}

void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    const std::string before = cfg.input;
    apply_config(cfg, in);
    // Relative input paths in a config file are relative to the file itself.
    if (cfg.input != before && !cfg.input.empty() && fs::path(cfg.input).is_relative()) {
        cfg.input = (fs::absolute(path).parent_path() / cfg.input).lexically_normal().string();
    }
}

std::string render_config(const PipelineConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.entries()) out += k + " = " + v + "\n";
    return out;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string() + " for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return hex.str();
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return in;
}

void close_checked(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw Error("failed writing " + path.string());
}

SparseMatrix load_matrix(const fs::path& path) {
    auto in = open_in(path);
    return read_matrix(in);
}

void save_matrix(const fs::path& path, const SparseMatrix& m) {
    auto out = open_out(path);
    write_matrix(out, m);
    close_checked(out, path);
}

Vocabulary load_vocab(const fs::path& path) {
    auto in = open_in(path);
    return read_vocabulary(in);
}

void save_vocab(const fs::path& path, const Vocabulary& vocab) {
    auto out = open_out(path);
    write_vocabulary(out, vocab);
    close_checked(out, path);
}

/// Reloads the parse-stage artifacts with their original ids.
ParseResult load_graph(const PipelineConfig& cfg, const fs::path& in) {
    Vocabulary vocab = load_vocab(in / stages::kGraphVocab);
    const std::size_t expected = vocab.size();
    ParseOptions options;
    options.capture_all_literals = true;
    options.label_property = cfg.label_property;
    auto graph_in = open_in(in / stages::kGraph);
    ParseResult r = parse_ntriples(graph_in, options, std::move(vocab));
    if (r.vocab.size() != expected) throw Error("graph.nt references terms missing from vocab_graph.tsv");
    return r;
}

}  // namespace

namespace stages {

nlohmann::json parse(const PipelineConfig& cfg, const fs::path& input, const fs::path& out) {
    ParseOptions options;
    options.literal_properties = {cfg.abstract_properties.begin(), cfg.abstract_properties.end()};
    options.label_property = cfg.label_property;
    options.lenient = cfg.lenient;
    auto in = open_in(input);
    ParseResult r = parse_ntriples(in, options);

    fs::create_directories(out);
    save_vocab(out / kGraphVocab, r.vocab);
    auto graph_out = open_out(out / kGraph);
    write_ntriples(graph_out, r.graph, r.vocab, cfg.label_property);
    close_checked(graph_out, out / kGraph);

    return {{"lines", r.stats.lines},
            {"edges", r.stats.edges},
            {"literals_captured", r.stats.literals_captured},
            {"literals_dropped", r.stats.literals_dropped},
            {"labels", r.stats.labels},
            {"malformed", r.stats.malformed},
            {"entities", r.vocab.count(TermKind::Entity)},
            {"predicates", r.vocab.count(TermKind::Predicate)}};
}

nlohmann::json graph_cooc(const PipelineConfig& cfg, const fs::path& in, const fs::path& out) {
    ParseResult r = load_graph(cfg, in);
    GraphCoocOptions options;
    options.ppr = cfg.ppr;
    options.threads = cfg.threads;
    options.dim = r.vocab.size();
    SparseMatrix m = graph_cooccurrence(r.graph, r.vocab, options);
    fs::create_directories(out);
    save_matrix(out / kGraphCooc, m);
    return {{"dim", m.dim()}, {"nnz", m.nnz()}};
}

nlohmann::json text_cooc(const PipelineConfig& cfg, const fs::path& in, const fs::path& out) {
    ParseResult r = load_graph(cfg, in);
    MatcherStats mstats;
    const EntityMatcher matcher = build_matcher(r.vocab, MatcherOptions{cfg.match_predicates}, &mstats);

    std::vector<TokenSequence> docs;
    std::size_t tokens = 0;
    for (const auto& [subject, literals] : r.graph.literals) {
        for (const Literal& lit : literals) {
            docs.push_back(link_text(lit.text, matcher, r.vocab));
            tokens += docs.back().size();
        }
    }
    SparseMatrix m = text_cooccurrence(docs, r.vocab, cfg.text);

    fs::create_directories(out);
    save_vocab(out / kVocab, r.vocab);
    save_matrix(out / kTextCooc, m);
    if (cfg.dump_linked) {
        auto linked = open_out(out / kLinked);
        write_linked_corpus(linked, docs, r.vocab);
        close_checked(linked, out / kLinked);
    }
    return {{"documents", docs.size()},
            {"tokens", tokens},
            {"words", r.vocab.count(TermKind::Word)},
            {"patterns", mstats.patterns},
            {"empty_labels", mstats.empty_labels},
            {"label_collisions", mstats.collisions},
            {"dim", m.dim()},
            {"nnz", m.nnz()}};
}

nlohmann::json merge(const PipelineConfig& cfg, const fs::path& in, const fs::path& out) {
    SparseMatrix graph = load_matrix(in / kGraphCooc);
    SparseMatrix text = load_matrix(in / kTextCooc);
    if (text.dim() < graph.dim()) throw DimensionMismatch("text matrix smaller than graph matrix");
    nlohmann::json stats;
    if (!text.empty()) {
        const double divisor = kth_largest(text, cfg.kth, cfg.kth_mode);
        text = scale_by_kth_largest(text, cfg.kth, cfg.kth_mode);
        stats["text_divisor"] = divisor;
    }
    SparseMatrix merged = merge_sum(graph.with_dim(text.dim()), text);
    fs::create_directories(out);
    save_matrix(out / kMerged, merged);
    stats["dim"] = merged.dim();
    stats["nnz"] = merged.nnz();
    return stats;
}

nlohmann::json train(const PipelineConfig& cfg, const fs::path& in, const fs::path& out, std::ostream& log) {
    SparseMatrix m = load_matrix(in / kMerged);
    Vocabulary vocab = load_vocab(in / kVocab);
    if (m.dim() != vocab.size()) throw DimensionMismatch("merged matrix and vocabulary disagree on size");
    GloveParams params = cfg.glove;
    params.threads = cfg.threads;
    char buf[64];
    TrainResult r = train(m, params, [&](std::size_t epoch, double loss) {
        auto res = std::to_chars(buf, buf + sizeof(buf), loss);
        log << epoch << '\t' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    });
    fs::create_directories(out);
    auto emb = open_out(out / kEmbeddings);
    emit_embeddings(emb, r.model, vocab, cfg.combine);
    close_checked(emb, out / kEmbeddings);
    return {{"terms", vocab.size()},
            {"cells", m.nnz()},
            {"initial_loss", r.initial_loss},
            {"final_loss", r.epoch_losses.back()}};
}

}  // namespace stages

std::vector<nlohmann::json> read_manifest(const fs::path& path) {
    std::vector<nlohmann::json> lines;
    std::ifstream in(path);
    if (!in) return lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
    }
    return lines;
}

PipelineConfig config_from_manifest(const std::vector<nlohmann::json>& manifest) {
    for (const auto& record : manifest) {
        if (record.value("kind", "") != "config") continue;
        PipelineConfig cfg;
        cfg.abstract_properties.clear();
        for (const auto& [key, value] : record.at("config").items()) {
            if (value.is_array()) {
                for (const auto& v : value) cfg.set(key, v.get<std::string>());
            } else {
                cfg.set(key, value.get<std::string>());
            }
        }
        return cfg;
    }
    throw Error("manifest has no config record");
}

namespace {

nlohmann::json config_record(const PipelineConfig& cfg) {
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [k, v] : cfg.entries()) {
        if (k == "abstract-property") {
            config[k].push_back(v);
        } else {
            config[k] = v;
        }
    }
    return {{"kind", "config"}, {"config", config}};
}

nlohmann::json stage_params(const PipelineConfig& cfg, std::initializer_list<std::string_view> keys) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : cfg.entries()) {
        for (auto key : keys) {
            if (k != key) continue;
            if (k == "abstract-property") {
                params[k].push_back(v);
            } else {
                params[k] = v;
            }
        }
    }
    return params;
}

struct StageDef {
    std::string name;
    std::vector<std::pair<std::string, fs::path>> inputs;  // logical name -> path
    std::vector<std::string> outputs;                      // file names in out dir
    nlohmann::json params;
    std::function<nlohmann::json()> run;
};

void write_manifest(const fs::path& path, const std::vector<nlohmann::json>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& line : lines) out << line.dump() << '\n';
}

const nlohmann::json* find_stage(const std::vector<nlohmann::json>& manifest, const std::string& name) {
    for (const auto& record : manifest) {
        if (record.value("kind", "") == "stage" && record.value("stage", "") == name) return &record;
    }
    return nullptr;
}

bool reusable(const nlohmann::json* old, const nlohmann::json& inputs, const StageDef& stage, const fs::path& out) {
    if (!old || old->value("params", nlohmann::json{}) != stage.params ||
        old->value("inputs", nlohmann::json{}) != inputs) {
        return false;
    }
    const auto& outputs = old->at("outputs");
    if (outputs.size() != stage.outputs.size()) return false;
    for (const auto& file : stage.outputs) {
        if (!outputs.contains(file) || !fs::is_regular_file(out / file)) return false;
        if (outputs.at(file).get<std::string>() != sha256_file(out / file)) return false;
    }
    return true;
}

}  // namespace

PipelineRun run_pipeline(const PipelineConfig& cfg, const fs::path& out) {
    cfg.validate();
    fs::create_directories(out);
    const fs::path manifest_path = out / stages::kManifest;
    std::vector<nlohmann::json> previous;
    try {
        previous = read_manifest(manifest_path);
    } catch (const nlohmann::json::exception&) {
        previous.clear();  // unreadable manifest: run everything
    }

    std::vector<std::string> text_outputs{stages::kVocab, stages::kTextCooc};
    if (cfg.dump_linked) {
        text_outputs.emplace_back(stages::kLinked);
    } else {
        fs::remove(out / stages::kLinked);
    }

    std::vector<StageDef> plan{
        {"parse",
         {{"input", cfg.input}},
         {stages::kGraphVocab, stages::kGraph},
         stage_params(cfg, {"abstract-property", "label-property", "lenient"}),
         [&] { return stages::parse(cfg, cfg.input, out); }},
        {"graph-cooc",
         {{stages::kGraphVocab, out / stages::kGraphVocab}, {stages::kGraph, out / stages::kGraph}},
         {stages::kGraphCooc},
         stage_params(cfg, {"ppr-alpha", "ppr-epsilon", "include-predicates"}),
         [&] { return stages::graph_cooc(cfg, out, out); }},
        {"text-cooc",
         {{stages::kGraphVocab, out / stages::kGraphVocab}, {stages::kGraph, out / stages::kGraph}},
         text_outputs,
         stage_params(cfg, {"label-property", "match-predicates", "window", "weighting", "min-word-count",
                            "dump-linked"}),
         [&] { return stages::text_cooc(cfg, out, out); }},
        {"merge",
         {{stages::kGraphCooc, out / stages::kGraphCooc}, {stages::kTextCooc, out / stages::kTextCooc}},
         {stages::kMerged},
         stage_params(cfg, {"kth", "kth-distinct"}),
         [&] { return stages::merge(cfg, out, out); }},
        {"train",
         {{stages::kMerged, out / stages::kMerged}, {stages::kVocab, out / stages::kVocab}},
         {stages::kEmbeddings, stages::kTrainLog},
         stage_params(cfg, {"dims", "iterations", "learning-rate", "x-max", "weight-exponent", "seed",
                            "deterministic", "combine"}),
         [&] {
             std::ofstream log(out / stages::kTrainLog, std::ios::binary);
             if (!log) throw Error("cannot write training log");
             return stages::train(cfg, out, out, log);
         }},
    };

    PipelineRun run;
    run.manifest.push_back(config_record(cfg));
    for (const StageDef& stage : plan) {
        nlohmann::json inputs = nlohmann::json::object();
        for (const auto& [name, path] : stage.inputs) {
            try {
                inputs[name] = sha256_file(path);
            } catch (const Error& e) {
                throw StageError(stage.name, e.what());
            }
        }
        const nlohmann::json* old = find_stage(previous, stage.name);
        if (reusable(old, inputs, stage, out)) {
            run.manifest.push_back(*old);
            run.skipped.push_back(stage.name);
        } else {
            nlohmann::json stats;
            try {
                stats = stage.run();
            } catch (const StageError&) {
                write_manifest(manifest_path, run.manifest);
                throw;
            } catch (const std::exception& e) {
                write_manifest(manifest_path, run.manifest);
                throw StageError(stage.name, e.what());
            }
            nlohmann::json outputs = nlohmann::json::object();
            for (const auto& file : stage.outputs) outputs[file] = sha256_file(out / file);
            run.manifest.push_back({{"kind", "stage"},
                                    {"stage", stage.name},
                                    {"params", stage.params},
                                    {"inputs", inputs},
                                    {"outputs", outputs},
                                    {"stats", stats}});
            run.executed.push_back(stage.name);
        }
        write_manifest(manifest_path, run.manifest);
    }
    return run;
}

}  // namespace litkg
