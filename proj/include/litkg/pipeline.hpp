#pragma once
// End-to-end orchestration: parse -> graph-cooc -> text-cooc -> merge -> train.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "litkg/glove_trainer.hpp"
#include "litkg/ppr_cooc.hpp"
#include "litkg/sparse_matrix.hpp"
#include "litkg/text_cooc.hpp"

namespace litkg {

namespace fs = std::filesystem;

struct PipelineConfig {
    std::string input;  // N-Triples file
    std::vector<std::string> abstract_properties{kDbpediaAbstract};
    std::string label_property = kRdfsLabel;
    bool lenient = false;
    bool match_predicates = false;
    bool dump_linked = false;
    PprParams ppr;
    TextCoocParams text;
    GloveParams glove;
    std::size_t kth = 100;
    KthMode kth_mode = KthMode::Multiset;
    CombineMode combine = CombineMode::SumFocusContext;
    /// Worker cap; not part of the resolved config since it never changes
    /// deterministic output.
    unsigned threads = 1;

    /// Sets one key from its textual form. Keys match the CLI flag names
    /// without the leading dashes. Throws ConfigError naming the key.
    void set(std::string_view key, std::string_view value);

    /// Checks value ranges and, when `check_paths`, that `input` exists.
    void validate(bool check_paths = true) const;

    /// Every result-affecting key with its resolved value, in a fixed order.
    /// `abstract-property` may appear several times.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Applies a `key = value` file (blank lines and `#` comments allowed). The
/// first `abstract-property` line replaces the default list, later ones append.
void apply_config(PipelineConfig& cfg, std::istream& in);
void apply_config_file(PipelineConfig& cfg, const fs::path& path);

/// Renders entries() in the config file format.
std::string render_config(const PipelineConfig& cfg);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const fs::path& path);

/// Stage runners. Each reads fixed file names from `in` and writes fixed file
/// names into `out`; returned json holds the stage's counters.
namespace stages {

inline constexpr const char* kGraphVocab = "vocab_graph.tsv";
inline constexpr const char* kGraph = "graph.nt";
inline constexpr const char* kGraphCooc = "graph.cooc";
inline constexpr const char* kVocab = "vocab.tsv";
inline constexpr const char* kTextCooc = "text.cooc";
inline constexpr const char* kLinked = "linked.txt";
inline constexpr const char* kMerged = "merged.cooc";
inline constexpr const char* kEmbeddings = "embeddings.txt";
inline constexpr const char* kTrainLog = "train_loss.tsv";
inline constexpr const char* kManifest = "manifest.jsonl";

nlohmann::json parse(const PipelineConfig& cfg, const fs::path& input, const fs::path& out);
nlohmann::json graph_cooc(const PipelineConfig& cfg, const fs::path& in, const fs::path& out);
nlohmann::json text_cooc(const PipelineConfig& cfg, const fs::path& in, const fs::path& out);
nlohmann::json merge(const PipelineConfig& cfg, const fs::path& in, const fs::path& out);
/// Writes embeddings into `out`; the `epoch<TAB>loss` log goes to `log`.
nlohmann::json train(const PipelineConfig& cfg, const fs::path& in, const fs::path& out, std::ostream& log);

}  // namespace stages

struct PipelineRun {
    /// Manifest lines: one config record, then one record per stage.
    std::vector<nlohmann::json> manifest;
    std::vector<std::string> executed;
    std::vector<std::string> skipped;
};

/// Runs every stage into `out`, skipping a stage when the existing manifest
/// records identical inputs and parameters and its outputs are unchanged on
/// disk. The manifest is rewritten after each stage. Stage failures are
/// rethrown as StageError; partial outputs are left in place.
PipelineRun run_pipeline(const PipelineConfig& cfg, const fs::path& out);

/// Reads a manifest.jsonl file.
std::vector<nlohmann::json> read_manifest(const fs::path& path);

/// Rebuilds the config recorded in a manifest's config record.
PipelineConfig config_from_manifest(const std::vector<nlohmann::json>& manifest);

}  // namespace litkg
