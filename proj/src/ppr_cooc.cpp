#include "litkg/ppr_cooc.hpp"

#include <algorithm>
#include <atomic>
#include <queue>
#include <set>
#include <thread>
#include <unordered_map>

#include "litkg/error.hpp"

namespace litkg {

void PprParams::validate() const {
    if (!(restart_alpha > 0.0 && restart_alpha < 1.0)) throw Error("restart_alpha must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
}

double ScoreVector::get(TermId id) const {
    auto it = std::lower_bound(scores.begin(), scores.end(), id,
                               [](const auto& entry, TermId key) { return entry.first < key; });
    return it != scores.end() && it->first == id ? it->second : 0.0;
}

double ScoreVector::total() const {
    double sum = 0.0;
    for (const auto& [id, score] : scores) sum += score;
    return sum;
}

namespace {

struct Paint {
    double amount;
    TermId node;
};

// Max-heap on amount, smallest id first on ties.
struct PaintOrder {
    bool operator()(const Paint& a, const Paint& b) const {
        if (a.amount != b.amount) return a.amount < b.amount;
        return a.node > b.node;
    }
};

ScoreVector to_sorted(const std::unordered_map<TermId, double>& scores) {
    ScoreVector out;
    out.scores.assign(scores.begin(), scores.end());
    std::sort(out.scores.begin(), out.scores.end());
    return out;
}

}  // namespace

ScoreVector bca_ppr(const AdjacencyView& view, TermId seed, const PprParams& params) {
    params.validate();
    if (seed >= view.num_nodes()) throw SeedNotFound("seed " + std::to_string(seed) + " is not in the graph");

    const double keep = params.restart_alpha;
    const double pass = 1.0 - params.restart_alpha;
    std::unordered_map<TermId, double> wet;
    std::unordered_map<TermId, double> scores;
    std::priority_queue<Paint, std::vector<Paint>, PaintOrder> queue;

    wet[seed] = 1.0;
    queue.push(Paint{1.0, seed});
    while (!queue.empty()) {
        Paint top = queue.top();
        queue.pop();
        auto it = wet.find(top.node);
        if (it == wet.end() || it->second != top.amount) continue;  // stale entry
        if (top.amount < params.epsilon) break;
        wet.erase(it);

        scores[top.node] += keep * top.amount;
        const double outflow = pass * top.amount;
        for (const Neighbor& nb : view.out_neighbors(top.node)) {
            const double parcel = outflow * nb.weight;
            double& waiting = wet[nb.target];
            waiting += parcel;
            queue.push(Paint{waiting, nb.target});
            if (params.include_predicates) scores[nb.predicate] += parcel;
        }
    }
    return to_sorted(scores);
}

namespace {

std::vector<Cell> seed_column(const AdjacencyView& forward, const AdjacencyView& reversed, TermId seed,
                              const PprParams& params) {
    ScoreVector f = bca_ppr(forward, seed, params);
    ScoreVector r = bca_ppr(reversed, seed, params);

    std::vector<Cell> column;
    auto fi = f.scores.begin();
    auto ri = r.scores.begin();
    auto emit = [&](TermId id, double w) {
        if (id != seed) column.push_back(Cell{seed, id, w});
    };
    while (fi != f.scores.end() || ri != r.scores.end()) {
        if (ri == r.scores.end() || (fi != f.scores.end() && fi->first < ri->first)) {
            emit(fi->first, fi->second);
            ++fi;
        } else if (fi == f.scores.end() || ri->first < fi->first) {
            emit(ri->first, ri->second);
            ++ri;
        } else {
            emit(fi->first, fi->second + ri->second);
            ++fi;
            ++ri;
        }
    }
    double total = 0.0;
    for (const Cell& c : column) total += c.weight;
    for (Cell& c : column) c.weight /= total;
    return column;
}

}  // namespace

SparseMatrix graph_cooccurrence(const KnowledgeGraph& graph, std::span<const TermId> entities,
                                const GraphCoocOptions& options) {
    options.ppr.validate();
    std::size_t dim = options.dim;
    for (const Edge& e : graph.edges) {
        dim = std::max<std::size_t>(dim, std::max({e.subject, e.predicate, e.object}) + std::size_t{1});
    }
    if (graph.edges.empty()) return SparseMatrix(dim);

    const AdjacencyView forward = build_adjacency(graph, Direction::Forward, {}, dim);
    const AdjacencyView reversed = build_adjacency(graph, Direction::Reversed, {}, dim);

    std::vector<TermId> seeds(entities.begin(), entities.end());
    if (seeds.empty()) {
        std::set<TermId> nodes;
        for (const Edge& e : graph.edges) {
            nodes.insert(e.subject);
            nodes.insert(e.object);
        }
        seeds.assign(nodes.begin(), nodes.end());
    }

    std::vector<std::vector<Cell>> columns(seeds.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            columns[i] = seed_column(forward, reversed, seeds[i], options.ppr);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(seeds.size())));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }

    std::vector<Cell> cells;
    for (auto& column : columns) cells.insert(cells.end(), column.begin(), column.end());
    return SparseMatrix::from_cells(dim, std::move(cells));
}

SparseMatrix graph_cooccurrence(const KnowledgeGraph& graph, const Vocabulary& vocab,
                                const GraphCoocOptions& options) {
    std::vector<TermId> seeds;
    for (TermId id = 0; id < vocab.size(); ++id) {
        if (vocab.kind(id) == TermKind::Entity) seeds.push_back(id);
    }
    GraphCoocOptions resolved = options;
    resolved.dim = std::max(resolved.dim, vocab.size());
    if (seeds.empty()) return SparseMatrix(resolved.dim);
    return graph_cooccurrence(graph, seeds, resolved);
}

}  // namespace litkg
