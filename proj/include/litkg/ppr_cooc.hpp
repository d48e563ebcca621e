#pragma once
// Personalized PageRank by bookmark coloring, and the graph-side
// co-occurrence matrix built from it.

#include <cstddef>
#include <utility>
#include <vector>

#include "litkg/graph_model.hpp"
#include "litkg/sparse_matrix.hpp"

namespace litkg {

struct PprParams {
    /// Fraction of the wet paint a node keeps when it is processed.
    double restart_alpha = 0.15;
    /// Processing stops once no node holds at least this much wet paint;
    /// whatever is left is discarded.
    double epsilon = 1e-5;
    /// Credit each push along an edge to the edge's predicate as well.
    bool include_predicates = false;

    void validate() const;
};

/// Sparse scores sorted by TermId; every score is > 0.
struct ScoreVector {
    std::vector<std::pair<TermId, double>> scores;

    double get(TermId id) const;
    double total() const;
};

/// Bookmark-coloring approximation of PPR restarting at `seed`.
///
/// One unit of wet paint starts at `seed`. The node holding the most wet paint
/// (smallest id on ties) is processed next: it keeps `restart_alpha` of that
/// paint as score and pushes the rest along its outgoing weights. Paint pushed
/// into an already queued node merges with what is waiting there. Paint
/// leaving a sink is lost. The run ends when the largest waiting amount falls
/// below `epsilon`.
///
/// Because the processing order does not depend on `epsilon`, a run with a
/// smaller epsilon extends the pop sequence of a larger one, so scores are
/// monotone in epsilon. Throws SeedNotFound if seed is outside the view.
ScoreVector bca_ppr(const AdjacencyView& view, TermId seed, const PprParams& params);

struct GraphCoocOptions {
    PprParams ppr;
    /// Number of worker threads for per-seed runs (0 or 1 = sequential).
    unsigned threads = 1;
    /// Matrix dimension; defaults to one past the largest id in the graph.
    std::size_t dim = 0;
};

/// For every entity e that occurs in an edge, column e is
/// L1-normalize( ppr_forward(e) + ppr_reversed(e) ) with e's own score removed.
/// `entities` lists the seeds; empty means every node of the graph.
SparseMatrix graph_cooccurrence(const KnowledgeGraph& graph, std::span<const TermId> entities,
                                const GraphCoocOptions& options);

/// Convenience overload seeding every entity of `vocab`.
SparseMatrix graph_cooccurrence(const KnowledgeGraph& graph, const Vocabulary& vocab,
                                const GraphCoocOptions& options);

}  // namespace litkg
