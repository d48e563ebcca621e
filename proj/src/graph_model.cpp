#include "litkg/graph_model.hpp"

#include <algorithm>
#include <cmath>

#include "litkg/error.hpp"

namespace litkg {

AdjacencyView::AdjacencyView(Direction direction, std::size_t num_nodes, std::vector<std::size_t> offsets,
                             std::vector<Neighbor> neighbors)
    : direction_(direction), num_nodes_(num_nodes), offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {}

std::span<const Neighbor> AdjacencyView::out_neighbors(TermId node) const {
    if (node >= num_nodes_) return {};
    return std::span<const Neighbor>(neighbors_).subspan(offsets_[node], offsets_[node + 1] - offsets_[node]);
}

AdjacencyView build_adjacency(const KnowledgeGraph& graph, Direction direction, const EdgeWeightFn& weight,
                              std::size_t num_nodes) {
    const bool forward = direction == Direction::Forward;
    for (const Edge& e : graph.edges) {
        num_nodes = std::max<std::size_t>(num_nodes, std::max(e.subject, e.object) + std::size_t{1});
    }
    if (graph.edges.empty() && num_nodes == 0) return AdjacencyView(direction, 0, {0}, {});

    std::vector<std::size_t> offsets(num_nodes + 1, 0);
    for (const Edge& e : graph.edges) ++offsets[(forward ? e.subject : e.object) + 1];
    for (std::size_t i = 0; i < num_nodes; ++i) offsets[i + 1] += offsets[i];

    std::vector<Neighbor> neighbors(graph.edges.size());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const Edge& e : graph.edges) {
        TermId source = forward ? e.subject : e.object;
        TermId target = forward ? e.object : e.subject;
        double w = weight ? weight(e) : 1.0;
        if (!(w > 0.0) || !std::isfinite(w)) throw Error("edge weight must be positive and finite");
        neighbors[cursor[source]++] = Neighbor{target, e.predicate, w};
    }

    for (std::size_t node = 0; node < num_nodes; ++node) {
        auto first = neighbors.begin() + static_cast<std::ptrdiff_t>(offsets[node]);
        auto last = neighbors.begin() + static_cast<std::ptrdiff_t>(offsets[node + 1]);
        double total = 0.0;
        for (auto it = first; it != last; ++it) total += it->weight;
        for (auto it = first; it != last; ++it) it->weight /= total;
    }
    return AdjacencyView(direction, num_nodes, std::move(offsets), std::move(neighbors));
}

KnowledgeGraph reverse_edges(const KnowledgeGraph& graph) {
    KnowledgeGraph reversed;
    reversed.literals = graph.literals;
    reversed.edges.reserve(graph.edges.size());
    for (const Edge& e : graph.edges) reversed.edges.push_back(Edge{e.object, e.predicate, e.subject});
    return reversed;
}

}  // namespace litkg
