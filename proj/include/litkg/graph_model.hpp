#pragma once
// Row-stochastic adjacency views over a KnowledgeGraph.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "litkg/rdf_ingest.hpp"

namespace litkg {

enum class Direction { Forward, Reversed };

struct Neighbor {
    TermId target;
    TermId predicate;
    double weight;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Raw (unnormalized, positive) weight of one edge. Weights are normalized
/// per source node after all edges are weighed.
using EdgeWeightFn = std::function<double(const Edge&)>;

/// Compressed adjacency lists indexed by TermId. Every non-sink node's
/// outgoing weights sum to 1. Parallel edges stay separate entries.
class AdjacencyView {
public:
    AdjacencyView() = default;
    AdjacencyView(Direction direction, std::size_t num_nodes, std::vector<std::size_t> offsets,
                  std::vector<Neighbor> neighbors);

    Direction direction() const noexcept { return direction_; }
    /// Number of addressable node ids (0..num_nodes-1).
    std::size_t num_nodes() const noexcept { return num_nodes_; }
    std::size_t num_edges() const noexcept { return neighbors_.size(); }

    std::span<const Neighbor> out_neighbors(TermId node) const;
    bool is_sink(TermId node) const { return out_neighbors(node).empty(); }

    friend bool operator==(const AdjacencyView&, const AdjacencyView&) = default;

private:
    Direction direction_ = Direction::Forward;
    std::size_t num_nodes_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> neighbors_;
};

/// Builds the view for one direction. `num_nodes` defaults to one past the
/// largest id used by an edge; pass the vocabulary size to address every term.
/// Neighbor order follows edge order in `graph`.
AdjacencyView build_adjacency(const KnowledgeGraph& graph, Direction direction,
                              const EdgeWeightFn& weight = {}, std::size_t num_nodes = 0);

/// The same graph with every edge flipped (literals unchanged).
KnowledgeGraph reverse_edges(const KnowledgeGraph& graph);

}  // namespace litkg
