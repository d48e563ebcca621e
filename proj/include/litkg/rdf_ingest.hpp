#pragma once
// Streaming N-Triples ingestion into a KnowledgeGraph.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "litkg/vocabulary.hpp"

namespace litkg {

inline constexpr const char* kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr const char* kDbpediaAbstract = "http://dbpedia.org/ontology/abstract";

struct Edge {
    TermId subject;
    TermId predicate;
    TermId object;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Literal {
    std::string property;
    std::string text;
    std::optional<std::string> language;

    friend bool operator==(const Literal&, const Literal&) = default;
};

/// Directed multigraph over Vocabulary ids. Duplicate edges are kept.
struct KnowledgeGraph {
    std::vector<Edge> edges;
    std::map<TermId, std::vector<Literal>> literals;
};

struct ParseOptions {
    std::set<std::string> literal_properties{kDbpediaAbstract};
    std::string label_property = kRdfsLabel;
    /// Skip and count malformed lines instead of throwing MalformedLine.
    bool lenient = false;
    /// Capture every non-label string literal regardless of property. Used when
    /// re-reading the canonical graph artifact written by write_ntriples.
    bool capture_all_literals = false;
};

/// Per-run counters. For every run:
///   lines == edges + literals_captured + literals_dropped + labels + malformed
/// where `lines` excludes blank and comment-only lines.
struct ParseStats {
    std::size_t lines = 0;
    std::size_t edges = 0;
    std::size_t literals_captured = 0;
    std::size_t literals_dropped = 0;
    std::size_t labels = 0;
    std::size_t malformed = 0;
};

struct ParseResult {
    KnowledgeGraph graph;
    Vocabulary vocab;
    ParseStats stats;
};

/// Parses line-delimited N-Triples. IRI objects become edges; string literals
/// on `literal_properties` become texts; literals on `label_property` become
/// the subject's label (first English one wins). Literals whose language tag
/// does not start with "en" are dropped. Blank nodes are entities named `_:x`.
ParseResult parse_ntriples(std::istream& in, const ParseOptions& options);

/// Same, but ids for terms already in `vocab` are preserved.
ParseResult parse_ntriples(std::istream& in, const ParseOptions& options, Vocabulary vocab);

/// Canonical serialization: edges in stored order, then labels, then literals
/// by subject id. Re-parsing yields the same graph.
void write_ntriples(std::ostream& out, const KnowledgeGraph& graph, const Vocabulary& vocab,
                    const std::string& label_property = kRdfsLabel);

/// Stored label, else the IRI local name (after the last '/' or '#') with
/// '_' read as space. Blank nodes without a stored label yield "".
std::string entity_label(const Vocabulary& vocab, TermId id);

/// N-Triples string escaping (quotes not included).
std::string escape_literal(std::string_view text);

}  // namespace litkg
