// litkg: knowledge-graph + literal-text embedding pipeline.
//
//   litkg all --config pipeline.conf --out <dir>
//   litkg parse --in data.nt --out <dir>
//   litkg graph-cooc | text-cooc | merge | train --in <dir> [--out <dir>]
//
// Exit codes: 0 success, 1 stage failure, 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "litkg/error.hpp"
#include "litkg/pipeline.hpp"

namespace {

using litkg::PipelineConfig;
namespace fs = std::filesystem;

constexpr int kExitStage = 1;
constexpr int kExitConfig = 2;

// Config keys that take a value on the command line.
const char* const kValueKeys[] = {"label-property", "ppr-alpha", "ppr-epsilon", "window",     "weighting",
                                  "min-word-count", "kth",       "dims",        "iterations", "learning-rate",
                                  "x-max",          "weight-exponent", "seed",  "combine"};
// Boolean config keys; each gets `--key` and `--no-key`.
const char* const kFlagKeys[] = {"lenient",      "match-predicates", "include-predicates",
                                 "kth-distinct", "deterministic",    "dump-linked"};

/// Command-line values that override the config file.
struct Overrides {
    std::string config_file;
    std::vector<std::string> abstracts;
    CLI::Option* abstracts_opt = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> value_opts;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> flag_opts;
    unsigned threads = 0;
    CLI::Option* threads_opt = nullptr;

    void attach(CLI::App* app) {
        app->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
        abstracts_opt = app->add_option("--abstract-property", abstracts, "literal property IRI (repeatable)");
        for (const char* key : kValueKeys) {
            value_opts[key] = app->add_option(std::string("--") + key, values[key]);
        }
        for (const char* key : kFlagKeys) {
            flag_opts[key] = app->add_flag(std::string("--") + key + ",!--no-" + key, flags[key]);
        }
        threads_opt = app->add_option("--threads", threads, "worker thread cap")->envname("LITKG_THREADS");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_file.empty()) litkg::apply_config_file(cfg, config_file);
        if (abstracts_opt->count() > 0) {
            cfg.abstract_properties.clear();
            for (const auto& p : abstracts) cfg.set("abstract-property", p);
        }
        for (const auto& [key, opt] : value_opts) {
            if (opt->count() > 0) cfg.set(key, values.at(key));
        }
        for (const auto& [key, opt] : flag_opts) {
            if (opt->count() > 0) cfg.set(key, flags.at(key) ? "true" : "false");
        }
        if (threads_opt->count() > 0) cfg.threads = threads;
        return cfg;
    }
};

void print_stats(const std::string& stage, const nlohmann::json& stats) {
    std::cerr << stage << ": " << stats.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embed knowledge-graph entities, predicates and literal-text words in one vector space"};
    app.require_subcommand(1);

    std::string in_path;
    std::string out_path;
    std::string input_override;
    std::string log_file;

    Overrides overrides;

    auto* all = app.add_subcommand("all", "run every stage into --out");
    overrides.attach(all);
    all->add_option("--out", out_path, "output directory")->required();
    all->add_option("--input", input_override, "N-Triples input (overrides the config file)");

    struct StageCommand {
        CLI::App* app;
        Overrides overrides;
    };
    std::vector<std::unique_ptr<StageCommand>> stage_cmds;
    auto add_stage = [&](const char* name, const char* help, bool in_is_file) {
        auto cmd = std::make_unique<StageCommand>();
        cmd->app = app.add_subcommand(name, help);
        cmd->overrides.attach(cmd->app);
        auto* in = cmd->app->add_option("--in", in_path, in_is_file ? "N-Triples input" : "input directory")
                       ->required();
        if (in_is_file) {
            in->check(CLI::ExistingFile);
        } else {
            in->check(CLI::ExistingDirectory);
        }
        cmd->app->add_option("--out", out_path, "output directory (defaults to --in for directory stages)");
        if (std::string(name) == "train") cmd->app->add_option("--log-file", log_file, "epoch<TAB>loss log");
        stage_cmds.push_back(std::move(cmd));
    };
    add_stage("parse", "N-Triples -> vocab_graph.tsv + graph.nt", true);
    add_stage("graph-cooc", "PPR graph co-occurrence -> graph.cooc", false);
    add_stage("text-cooc", "entity linking + text co-occurrence -> vocab.tsv + text.cooc", false);
    add_stage("merge", "scale text matrix and sum with graph matrix -> merged.cooc", false);
    add_stage("train", "GloVe training -> embeddings.txt", false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (all->parsed()) {
            PipelineConfig cfg = overrides.resolve();
            if (!input_override.empty()) cfg.set("input", input_override);
            cfg.validate();
            auto run = litkg::run_pipeline(cfg, out_path);
            for (const auto& s : run.skipped) std::cerr << s << ": up to date\n";
            for (std::size_t i = 1; i < run.manifest.size(); ++i) {
                const auto& record = run.manifest[i];
                print_stats(record.at("stage").get<std::string>(), record.value("stats", nlohmann::json{}));
            }
            return 0;
        }
        for (const auto& cmd : stage_cmds) {
            if (!cmd->app->parsed()) continue;
            const std::string name = cmd->app->get_name();
            PipelineConfig cfg = cmd->overrides.resolve();
            cfg.validate(false);
            const fs::path in = in_path;
            const fs::path out = out_path.empty() ? (name == "parse" ? fs::path(".") : in) : fs::path(out_path);
            try {
                nlohmann::json stats;
                if (name == "parse") {
                    stats = litkg::stages::parse(cfg, in, out);
                } else if (name == "graph-cooc") {
                    stats = litkg::stages::graph_cooc(cfg, in, out);
                } else if (name == "text-cooc") {
                    stats = litkg::stages::text_cooc(cfg, in, out);
                } else if (name == "merge") {
                    stats = litkg::stages::merge(cfg, in, out);
                } else {
                    if (log_file.empty()) {
                        stats = litkg::stages::train(cfg, in, out, std::cerr);
                    } else {
                        std::ofstream log(log_file);
                        if (!log) throw litkg::Error("cannot write " + log_file);
                        stats = litkg::stages::train(cfg, in, out, log);
                    }
                }
                print_stats(name, stats);
            } catch (const litkg::ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw litkg::StageError(name, e.what());
            }
            return 0;
        }
    } catch (const litkg::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStage;
    }
    return 0;
}
