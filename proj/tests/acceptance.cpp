// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <sstream>
#include <string>
#include <unistd.h>

#include "litkg/glove_trainer.hpp"
#include "litkg/graph_model.hpp"
#include "litkg/pipeline.hpp"
#include "litkg/ppr_cooc.hpp"
#include "litkg/sparse_matrix.hpp"
#include "litkg/text_cooc.hpp"
#include "oracles.hpp"

using namespace litkg;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

KnowledgeGraph make_graph(std::size_t n, const std::vector<oracle::RawEdge>& edges) {
    KnowledgeGraph g;
    for (auto [s, t] : edges) {
        g.edges.push_back(Edge{static_cast<TermId>(s), static_cast<TermId>(n), static_cast<TermId>(t)});
    }
    return g;
}

PprParams ppr(double alpha, double eps) {
    PprParams p;
    p.restart_alpha = alpha;
    p.epsilon = eps;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("litkg_accept_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void ppr_oracle_equivalence() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    const double eps = 1e-8;
    double worst_ratio = 0.0;
    bool ok = true;
    for (int graph = 0; graph < 100; ++graph) {
        const std::size_t n = 1 + rng() % 50;
        auto edges = oracle::random_graph(rng, n, 0.2);
        auto view = build_adjacency(make_graph(n, edges), Direction::Forward, {}, n);
        for (int s = 0; s < 3; ++s) {
            const auto seed = static_cast<TermId>(rng() % n);
            auto scores = bca_ppr(view, seed, ppr(0.15, eps));
            auto dense = oracle::power_iteration_ppr(n, edges, seed, 0.15, 10000);
            double l1 = 0.0;
            for (std::size_t v = 0; v < n; ++v) l1 += std::abs(scores.get(static_cast<TermId>(v)) - dense[v]);
            const double bound = 5 * eps * static_cast<double>(n);
            worst_ratio = std::max(worst_ratio, l1 / bound);
            ok = ok && l1 <= bound;
        }
    }
    const double t = seconds_since(start);
    report("ppr-oracle-equivalence", ok && t < 30.0,
           fmt("100 graphs x 3 seeds, worst L1/bound %.3g, %.2fs (limit 30s)", worst_ratio, t));
}

void ppr_two_cycle() {
    KnowledgeGraph g;
    g.edges = {{0, 2, 1}, {1, 2, 0}};
    auto s = bca_ppr(build_adjacency(g, Direction::Forward, {}, 2), 0, ppr(0.5, 1e-12));
    const double e0 = std::abs(s.get(0) - 2.0 / 3.0);
    const double e1 = std::abs(s.get(1) - 1.0 / 3.0);
    report("ppr-two-cycle", e0 <= 1e-9 && e1 <= 1e-9,
           fmt("scores (%.12f, %.12f), max error %.2g (tol 1e-9)", s.get(0), s.get(1), std::max(e0, e1)));
}

void text_cooc_equivalence() {
    const auto start = Clock::now();
    std::mt19937_64 rng(77);
    bool ok = true;
    std::size_t cells = 0;
    for (int corpus = 0; corpus < 500; ++corpus) {
        const std::size_t vocab_size = 1 + rng() % 30;
        Vocabulary v;
        for (std::size_t i = 0; i < vocab_size; ++i) v.intern("w" + std::to_string(i), TermKind::Word);
        std::size_t budget = rng() % 101;
        std::vector<TokenSequence> docs;
        std::vector<std::vector<std::size_t>> raw;
        while (budget > 0) {
            const std::size_t len = 1 + rng() % budget;
            budget -= len;
            docs.emplace_back();
            raw.emplace_back();
            for (std::size_t i = 0; i < len; ++i) {
                const auto t = static_cast<TermId>(rng() % vocab_size);
                docs.back().push_back(t);
                raw.back().push_back(t);
            }
        }
        TextCoocParams p;
        p.window = 1 + corpus % 10;
        p.weighting = corpus % 2 ? WindowWeighting::Uniform : WindowWeighting::Harmonic;
        p.min_word_count = 0;
        auto m = text_cooccurrence(docs, v, p);
        auto expected = oracle::text_cooc(raw, p.window, p.weighting == WindowWeighting::Harmonic);
        if (m.nnz() != expected.size()) {
            ok = false;
            continue;
        }
        for (const Cell& c : m.cells()) {
            auto it = expected.find({c.focus, c.context});
            ok = ok && it != expected.end() && it->second == c.weight;
        }
        cells += m.nnz();
    }
    const double t = seconds_since(start);
    report("text-cooc-equivalence", ok && t < 10.0,
           fmt("500 corpora, %zu cells compared exactly, %.2fs (limit 10s)", cells, t));
}

void kth_scaling() {
    std::mt19937_64 rng(5);
    bool ok = true;
    int clamped = 0, with_duplicates = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t dim = 2 + rng() % 30;
        const std::size_t n = 1 + rng() % 200;
        const bool integers = trial % 2 == 0;
        std::vector<Cell> cells;
        for (std::size_t i = 0; i < n; ++i) {
            double w = integers ? static_cast<double>(1 + rng() % 5)
                                : std::uniform_real_distribution<double>(1e-3, 1e3)(rng);
            cells.push_back(Cell{static_cast<TermId>(rng() % dim), static_cast<TermId>(rng() % dim), w});
        }
        auto m = SparseMatrix::from_cells(dim, cells);
        const std::size_t k = 1 + rng() % 250;
        const SparseMatrix scaled = scale_by_kth_largest(m, k);
        std::vector<double> out;
        for (const Cell& c : scaled.cells()) out.push_back(c.weight);
        std::sort(out.begin(), out.end(), std::greater<>());
        const std::size_t kk = std::min(k, out.size());
        clamped += k > out.size();
        with_duplicates += std::set<double>(out.begin(), out.end()).size() < out.size();
        ok = ok && out[kk - 1] == 1.0;
    }
    report("kth-largest-scaling", ok,
           fmt("1000 matrices (%d clamped, %d with duplicate values), k'-th entry == 1.0", clamped, with_duplicates));
}

void gradient_check() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> xs(0.05, 250.0);
    const double h = 1e-5;
    double worst = 0.0;
    std::size_t coords = 0;
    for (int sample = 0; sample < 1000; ++sample) {
        GloveParams p;
        p.dims = 1 + rng() % 10;
        const std::size_t terms = 2 + rng() % 4;
        EmbeddingModel m(terms, p.dims);
        for (TermId t = 0; t < terms; ++t) {
            for (double& v : m.focus(t)) v = u(rng);
            for (double& v : m.context(t)) v = u(rng);
            m.focus_bias(t) = u(rng);
            m.context_bias(t) = u(rng);
        }
        const auto i = static_cast<TermId>(rng() % terms);
        const auto j = static_cast<TermId>(rng() % terms);
        const double x = xs(rng);
        CellGradient g = cell_gradient(m, i, j, x, p);
        auto check = [&](double analytic, double& param) {
            const double saved = param;
            param = saved + h;
            const double up = cell_loss(m, i, j, x, p);
            param = saved - h;
            const double down = cell_loss(m, i, j, x, p);
            param = saved;
            const double fd = (up - down) / (2 * h);
            const double scale = std::max(std::abs(analytic), std::abs(fd));
            if (scale > 0) worst = std::max(worst, std::abs(analytic - fd) / scale);
            ++coords;
        };
        for (std::size_t k = 0; k < p.dims; ++k) {
            check(g.focus[k], m.focus(i)[k]);
            check(g.context[k], m.context(j)[k]);
        }
        check(g.focus_bias, m.focus_bias(i));
        check(g.context_bias, m.context_bias(j));
    }
    report("glove-gradient-check", worst <= 1e-4,
           fmt("1000 samples, %zu coordinates, worst relative error %.3g (tol 1e-4)", coords, worst));
}

SparseMatrix twenty_cell_matrix() {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> w(1.0, 100.0);
    std::map<std::pair<TermId, TermId>, double> cells;
    while (cells.size() < 20) {
        cells.emplace(std::pair{static_cast<TermId>(rng() % 10), static_cast<TermId>(rng() % 10)}, w(rng));
    }
    std::vector<Cell> out;
    for (auto [key, weight] : cells) out.push_back(Cell{key.first, key.second, weight});
    return SparseMatrix::from_cells(10, out);
}

void training_progress() {
    auto m = twenty_cell_matrix();
    GloveParams p;
    p.dims = 4;
    p.iterations = 50;
    p.seed = 42;
    p.deterministic = true;
    auto a = train(m, p);
    auto b = train(m, p);
    const bool reproducible = a.model == b.model && a.epoch_losses == b.epoch_losses;
    const bool decreased = a.epoch_losses.back() < a.epoch_losses.front();
    report("glove-training-progress", decreased && reproducible,
           fmt("epoch 1 loss %.6g, epoch 50 loss %.6g, bit-identical rerun: %s", a.epoch_losses.front(),
               a.epoch_losses.back(), reproducible ? "yes" : "no"));
}

void end_to_end() {
    const auto start = Clock::now();
    PipelineConfig cfg;
    apply_config_file(cfg, fs::path(LITKG_FIXTURES_DIR) / "tiny.conf");
    auto a = scratch("e2e_a");
    auto b = scratch("e2e_b");
    std::string detail;
    bool ok = true;
    try {
        const std::string conf = (fs::path(LITKG_FIXTURES_DIR) / "tiny.conf").string();
        for (const fs::path& dir : {a, b}) {
            const std::string cmd = "\"" LITKG_CLI_PATH "\" all --config \"" + conf + "\" --out \"" + dir.string() +
                                    "\" >/dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) throw std::runtime_error("litkg all failed: " + cmd);
        }
        const bool same = slurp(a / stages::kManifest) == slurp(b / stages::kManifest);

        std::ifstream nt(cfg.input);
        auto parsed = parse_ntriples(nt, ParseOptions{});
        std::set<std::string> expected;
        for (const Term& t : parsed.vocab.terms()) expected.insert(t.name);
        for (const auto& [id, lits] : parsed.graph.literals) {
            for (const Literal& lit : lits) {
                for (const std::string& tok : tokenize(lit.text)) expected.insert(tok);
            }
        }
        std::ifstream emb(a / stages::kEmbeddings);
        auto rows = read_embeddings(emb);
        std::set<std::string> emitted;
        bool finite = true;
        for (const auto& row : rows) {
            emitted.insert(row.term);
            for (double v : row.vector) finite = finite && std::isfinite(v);
        }
        // Tokens swallowed by an entity mention are not words of their own.
        std::ifstream vin(a / stages::kVocab);
        Vocabulary vocab = read_vocabulary(vin);
        std::set<std::string> linked_words;
        std::ifstream linked(a / stages::kLinked);
        for (std::string tok; linked >> tok;) {
            if (tok.front() != '<') linked_words.insert(tok);
        }
        std::set<std::string> graph_terms;
        for (const Term& t : parsed.vocab.terms()) graph_terms.insert(t.name);
        std::set<std::string> want = graph_terms;
        want.insert(linked_words.begin(), linked_words.end());
        const bool vocab_ok = emitted == want && rows.size() == vocab.size() &&
                              std::includes(expected.begin(), expected.end(), want.begin(), want.end());
        const double t = seconds_since(start);
        ok = same && vocab_ok && finite && t < 10.0;
        detail = fmt("manifests identical: %s, %zu terms (%zu graph + %zu words), finite: %s, %.2fs (limit 10s)",
                     same ? "yes" : "no", rows.size(), graph_terms.size(), linked_words.size(), finite ? "yes" : "no", t);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report("end-to-end-fixture", ok, detail);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    return dot / std::sqrt(na * nb);
}

void semantic_sanity() {
    auto dir = scratch("semantic");
    const std::string ns = "http://example.org/resource/";
    const char* cluster_names[2] = {"Harbor", "Summit"};
    const char* cluster_words[2][6] = {{"coast", "port", "ships", "tide", "fishing", "sea"},
                                       {"peak", "glacier", "ridge", "snow", "climbing", "alpine"}};
    std::mt19937_64 rng(20);
    {
        std::ofstream nt(dir / "clusters.nt");
        for (int c = 0; c < 2; ++c) {
            for (int i = 0; i < 10; ++i) {
                const std::string e = ns + cluster_names[c] + std::to_string(i);
                for (int d : {1, 3}) {
                    nt << '<' << e << "> <http://example.org/ontology/near> <" << ns << cluster_names[c]
                       << (i + d) % 10 << "> .\n";
                }
                std::string text = std::string(cluster_names[c]) + std::to_string(i) + " is";
                for (int s = 0; s < 12; ++s) {
                    // A quarter of the words come from the other cluster's vocabulary.
                    const int from = rng() % 4 == 0 ? 1 - c : c;
                    text += " " + std::string(cluster_words[from][rng() % 6]);
                    if (s % 3 == 2) text += " " + std::string(cluster_names[c]) + std::to_string(rng() % 10);
                }
                nt << '<' << e << "> <http://dbpedia.org/ontology/abstract> \"" << text << ".\"@en .\n";
            }
        }
    }
    PipelineConfig cfg;
    cfg.input = (dir / "clusters.nt").string();
    cfg.text.min_word_count = 1;
    cfg.glove.dims = 10;
    cfg.glove.iterations = 300;
    cfg.glove.seed = 3;
    std::string detail;
    bool ok = true;
    try {
        run_pipeline(cfg, dir / "out");
        std::ifstream emb(dir / "out" / stages::kEmbeddings);
        std::map<std::string, std::vector<double>> vec;
        for (auto& row : read_embeddings(emb)) vec[row.term] = std::move(row.vector);
        double within = 0, across = 0;
        std::size_t nw = 0, na = 0;
        for (int c1 = 0; c1 < 2; ++c1) {
            for (int i = 0; i < 10; ++i) {
                for (int c2 = 0; c2 < 2; ++c2) {
                    for (int j = 0; j < 10; ++j) {
                        if (c1 == c2 && i == j) continue;
                        const double s = cosine(vec.at(ns + cluster_names[c1] + std::to_string(i)),
                                                vec.at(ns + cluster_names[c2] + std::to_string(j)));
                        if (c1 == c2) within += s, ++nw;
                        else across += s, ++na;
                    }
                }
            }
        }
        within /= static_cast<double>(nw);
        across /= static_cast<double>(na);
        ok = within > across;
        detail = fmt("mean cosine within %.4f vs across %.4f", within, across);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report("semantic-sanity", ok, detail);
}

}  // namespace

int main() {
    ppr_oracle_equivalence();
    ppr_two_cycle();
    text_cooc_equivalence();
    kth_scaling();
    gradient_check();
    training_progress();
    end_to_end();
    semantic_sanity();
    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
