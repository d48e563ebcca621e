#pragma once
// GloVe weighted least-squares training with AdaGrad updates.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "litkg/sparse_matrix.hpp"
#include "litkg/vocabulary.hpp"

namespace litkg {

struct GloveParams {
    std::size_t dims = 200;
    std::size_t iterations = 50;
    double learning_rate = 0.05;
    double x_max = 100.0;
    double weight_exponent = 0.75;
    std::uint64_t seed = 1;
    /// Sequential update stream; when false, `threads` workers update shared
    /// parameters without locking and results vary between runs.
    bool deterministic = true;
    unsigned threads = 1;

    void validate() const;
};

/// Focus vectors w, context vectors w~ and both bias arrays, stored flat.
class EmbeddingModel {
public:
    EmbeddingModel() = default;
    EmbeddingModel(std::size_t terms, std::size_t dims);

    std::size_t terms() const noexcept { return terms_; }
    std::size_t dims() const noexcept { return dims_; }

    std::span<double> focus(TermId t) { return {focus_.data() + t * dims_, dims_}; }
    std::span<const double> focus(TermId t) const { return {focus_.data() + t * dims_, dims_}; }
    std::span<double> context(TermId t) { return {context_.data() + t * dims_, dims_}; }
    std::span<const double> context(TermId t) const { return {context_.data() + t * dims_, dims_}; }
    double& focus_bias(TermId t) { return focus_bias_[t]; }
    double focus_bias(TermId t) const { return focus_bias_[t]; }
    double& context_bias(TermId t) { return context_bias_[t]; }
    double context_bias(TermId t) const { return context_bias_[t]; }

    /// Exchanges the focus and context roles (vectors and biases).
    EmbeddingModel swapped_roles() const;

    bool all_finite() const;

    friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

private:
    std::size_t terms_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> focus_;
    std::vector<double> context_;
    std::vector<double> focus_bias_;
    std::vector<double> context_bias_;
};

/// (x / x_max)^exponent below x_max, 1 at or above. Throws NonPositiveCount.
double glove_weight(double x, double x_max, double exponent);

/// f(x) * (w_i . w~_j + b_i + b~_j - ln x)^2. Throws NonPositiveCount.
double cell_loss(const EmbeddingModel& model, TermId i, TermId j, double x, const GloveParams& params);

struct CellGradient {
    std::vector<double> focus;    // d loss / d w_i
    std::vector<double> context;  // d loss / d w~_j
    double focus_bias = 0.0;
    double context_bias = 0.0;
};

/// Analytic gradient of cell_loss.
CellGradient cell_gradient(const EmbeddingModel& model, TermId i, TermId j, double x, const GloveParams& params);

/// Sum of cell_loss over all cells of `m`.
double total_loss(const EmbeddingModel& model, const SparseMatrix& m, const GloveParams& params);

/// Uniform initialization in (-0.5/dims, 0.5/dims) from `seed`.
EmbeddingModel init_model(std::size_t terms, const GloveParams& params);

struct TrainResult {
    EmbeddingModel model;
    double initial_loss = 0.0;
    /// Full-matrix loss after each epoch.
    std::vector<double> epoch_losses;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Runs `iterations` epochs over the cells of `m` in a per-epoch shuffled
/// order. Throws EmptyMatrix, or DivergenceDetected when a parameter becomes
/// non-finite.
TrainResult train(const SparseMatrix& m, const GloveParams& params, const EpochCallback& on_epoch = {});

enum class CombineMode { SumFocusContext, FocusOnly };

/// `term v1 ... v_dims` per vocabulary term, ids ascending. Entities and
/// predicates are written as bare IRIs, words as tokens.
void emit_embeddings(std::ostream& out, const EmbeddingModel& model, const Vocabulary& vocab, CombineMode combine);

struct EmbeddingRow {
    std::string term;
    std::vector<double> vector;
};

/// Reads an embedding file back. Every row must have the same width; throws
/// MalformedLine otherwise.
std::vector<EmbeddingRow> read_embeddings(std::istream& in);

CombineMode parse_combine(std::string_view text);
std::string_view to_string(CombineMode mode);

}  // namespace litkg
