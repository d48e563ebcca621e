#include "litkg/glove_trainer.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "litkg/error.hpp"

namespace litkg {

void GloveParams::validate() const {
    if (dims < 1) throw Error("dims must be at least 1");
    if (iterations < 1) throw Error("iterations must be at least 1");
    if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
    if (!(x_max > 0.0)) throw Error("x_max must be positive");
    if (!(weight_exponent > 0.0 && weight_exponent <= 1.0)) throw Error("weight_exponent must lie in (0, 1]");
}

EmbeddingModel::EmbeddingModel(std::size_t terms, std::size_t dims)
    : terms_(terms),
      dims_(dims),
      focus_(terms * dims, 0.0),
      context_(terms * dims, 0.0),
      focus_bias_(terms, 0.0),
      context_bias_(terms, 0.0) {}

EmbeddingModel EmbeddingModel::swapped_roles() const {
    EmbeddingModel m = *this;
    std::swap(m.focus_, m.context_);
    std::swap(m.focus_bias_, m.context_bias_);
    return m;
}

bool EmbeddingModel::all_finite() const {
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return finite(focus_) && finite(context_) && finite(focus_bias_) && finite(context_bias_);
}

double glove_weight(double x, double x_max, double exponent) {
    if (!(x > 0.0)) throw NonPositiveCount("co-occurrence value must be positive");
    return x < x_max ? std::pow(x / x_max, exponent) : 1.0;
}

namespace {

double residual(const EmbeddingModel& model, TermId i, TermId j, double x) {
    auto w = model.focus(i);
    auto c = model.context(j);
    double dot = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) dot += w[k] * c[k];
    return dot + model.focus_bias(i) + model.context_bias(j) - std::log(x);
}

}  // namespace

double cell_loss(const EmbeddingModel& model, TermId i, TermId j, double x, const GloveParams& params) {
    const double f = glove_weight(x, params.x_max, params.weight_exponent);
    const double r = residual(model, i, j, x);
    return f * r * r;
}

CellGradient cell_gradient(const EmbeddingModel& model, TermId i, TermId j, double x, const GloveParams& params) {
    const double g = 2.0 * glove_weight(x, params.x_max, params.weight_exponent) * residual(model, i, j, x);
    auto w = model.focus(i);
    auto c = model.context(j);
    CellGradient grad;
    grad.focus.resize(w.size());
    grad.context.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        grad.focus[k] = g * c[k];
        grad.context[k] = g * w[k];
    }
    grad.focus_bias = g;
    grad.context_bias = g;
    return grad;
}

double total_loss(const EmbeddingModel& model, const SparseMatrix& m, const GloveParams& params) {
    double sum = 0.0;
    for (const Cell& c : m.cells()) sum += cell_loss(model, c.focus, c.context, c.weight, params);
    return sum;
}

namespace {

// Uniform in the open interval (0, 1).
double open_unit(std::mt19937_64& rng) {
    for (;;) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

}  // namespace

EmbeddingModel init_model(std::size_t terms, const GloveParams& params) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    EmbeddingModel model(terms, params.dims);
    const double dims = static_cast<double>(params.dims);
    auto draw = [&] { return (open_unit(rng) - 0.5) / dims; };
    for (TermId t = 0; t < terms; ++t) {
        for (double& v : model.focus(t)) v = draw();
    }
    for (TermId t = 0; t < terms; ++t) {
        for (double& v : model.context(t)) v = draw();
    }
    for (TermId t = 0; t < terms; ++t) model.focus_bias(t) = draw();
    for (TermId t = 0; t < terms; ++t) model.context_bias(t) = draw();
    return model;
}

namespace {

// AdaGrad squared-gradient accumulators, laid out like EmbeddingModel.
struct Accumulators {
    explicit Accumulators(const EmbeddingModel& like) : sq(like.terms(), like.dims()) {
        for (TermId t = 0; t < like.terms(); ++t) {
            std::fill(sq.focus(t).begin(), sq.focus(t).end(), 1.0);
            std::fill(sq.context(t).begin(), sq.context(t).end(), 1.0);
            sq.focus_bias(t) = 1.0;
            sq.context_bias(t) = 1.0;
        }
    }
    EmbeddingModel sq;
};

// Plain access for the sequential stream; relaxed atomics when workers share
// parameters so concurrent updates are lossy but well-defined.
template <bool Shared>
struct Access {
    static double load(double& x) {
        if constexpr (Shared) return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
        return x;
    }
    static void store(double& x, double v) {
        if constexpr (Shared) {
            std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
        } else {
            x = v;
        }
    }
};

/// Applies one AdaGrad step for cell `c`; returns false if a parameter
/// became non-finite.
template <bool Shared>
bool update_cell(EmbeddingModel& model, Accumulators& acc, const Cell& c, const GloveParams& params) {
    using A = Access<Shared>;
    auto w = model.focus(c.focus);
    auto wc = model.context(c.context);
    auto gw = acc.sq.focus(c.focus);
    auto gc = acc.sq.context(c.context);
    const std::size_t dims = w.size();

    double dot = 0.0;
    for (std::size_t k = 0; k < dims; ++k) dot += A::load(w[k]) * A::load(wc[k]);
    const double r = dot + A::load(model.focus_bias(c.focus)) + A::load(model.context_bias(c.context)) -
                     std::log(c.weight);
    const double g = 2.0 * glove_weight(c.weight, params.x_max, params.weight_exponent) * r;
    const double lr = params.learning_rate;

    bool finite = true;
    auto step = [&](double& param, double& accum, double grad) {
        const double a = A::load(accum) + grad * grad;
        A::store(accum, a);
        const double v = A::load(param) - lr * grad / std::sqrt(a);
        finite = finite && std::isfinite(v);
        A::store(param, v);
    };
    for (std::size_t k = 0; k < dims; ++k) {
        const double wi = A::load(w[k]);
        const double wj = A::load(wc[k]);
        step(w[k], gw[k], g * wj);
        step(wc[k], gc[k], g * wi);
    }
    step(model.focus_bias(c.focus), acc.sq.focus_bias(c.focus), g);
    step(model.context_bias(c.context), acc.sq.context_bias(c.context), g);
    return finite;
}

}  // namespace

TrainResult train(const SparseMatrix& m, const GloveParams& params, const EpochCallback& on_epoch) {
    params.validate();
    if (m.empty()) throw EmptyMatrix("cannot train on an empty matrix");

    TrainResult result;
    result.model = init_model(m.dim(), params);
    result.initial_loss = total_loss(result.model, m, params);
    Accumulators acc(result.model);

    // Shuffling draws from its own stream so initialization stays independent
    // of the number of epochs.
    std::mt19937_64 shuffle_rng(params.seed ^ 0x9E3779B97F4A7C15ull);
    const auto cells = m.cells();
    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const unsigned workers =
        params.deterministic ? 1u : std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(cells.size())));

    for (std::size_t epoch = 1; epoch <= params.iterations; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        if (workers == 1) {
            for (std::size_t idx : order) {
                if (!update_cell<false>(result.model, acc, cells[idx], params)) {
                    throw DivergenceDetected(static_cast<int>(epoch), cells[idx].focus, cells[idx].context);
                }
            }
        } else {
            std::atomic<bool> diverged{false};
            std::atomic<std::size_t> bad{0};
            {
                std::vector<std::jthread> pool;
                const std::size_t chunk = (order.size() + workers - 1) / workers;
                for (unsigned t = 0; t < workers; ++t) {
                    pool.emplace_back([&, t] {
                        const std::size_t begin = t * chunk;
                        const std::size_t end = std::min(order.size(), begin + chunk);
                        for (std::size_t p = begin; p < end && !diverged.load(std::memory_order_relaxed); ++p) {
                            if (!update_cell<true>(result.model, acc, cells[order[p]], params)) {
                                bad.store(order[p]);
                                diverged.store(true);
                            }
                        }
                    });
                }
            }
            if (diverged) {
                const Cell& c = cells[bad.load()];
                throw DivergenceDetected(static_cast<int>(epoch), c.focus, c.context);
            }
        }
        const double loss = total_loss(result.model, m, params);
        if (!std::isfinite(loss)) throw DivergenceDetected(static_cast<int>(epoch), 0, 0);
        result.epoch_losses.push_back(loss);
        if (on_epoch) on_epoch(epoch, loss);
    }
    return result;
}

void emit_embeddings(std::ostream& out, const EmbeddingModel& model, const Vocabulary& vocab, CombineMode combine) {
    if (model.terms() < vocab.size()) throw Error("model has fewer terms than the vocabulary");
    char buf[64];
    for (TermId t = 0; t < vocab.size(); ++t) {
        out << vocab.name(t);
        auto w = model.focus(t);
        auto c = model.context(t);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double v = combine == CombineMode::SumFocusContext ? w[k] + c[k] : w[k];
            auto res = std::to_chars(buf, buf + sizeof(buf), v);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << '\n';
    }
    if (!out) throw Error("failed to write embeddings");
}

std::vector<EmbeddingRow> read_embeddings(std::istream& in) {
    std::vector<EmbeddingRow> rows;
    std::string line;
    std::uint64_t offset = 0;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const std::uint64_t start = offset;
        offset += line.size() + 1;
        std::size_t pos = line.find(' ');
        if (pos == 0 || pos == std::string::npos) throw MalformedLine(n, start, "expected a term and a vector");
        EmbeddingRow row{line.substr(0, pos), {}};
        while (pos < line.size()) {
            const std::size_t begin = pos + 1;
            std::size_t end = line.find(' ', begin);
            if (end == std::string::npos) end = line.size();
            double v = 0.0;
            auto res = std::from_chars(line.data() + begin, line.data() + end, v);
            if (res.ec != std::errc{} || res.ptr != line.data() + end) {
                throw MalformedLine(n, start + begin, "bad vector component");
            }
            row.vector.push_back(v);
            pos = end;
        }
        if (!rows.empty() && row.vector.size() != rows.front().vector.size()) {
            throw MalformedLine(n, start, "vector width differs from the first row");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CombineMode parse_combine(std::string_view text) {
    if (text == "sum") return CombineMode::SumFocusContext;
    if (text == "focus") return CombineMode::FocusOnly;
    throw Error("unknown combine mode '" + std::string(text) + "'");
}

std::string_view to_string(CombineMode mode) {
    return mode == CombineMode::SumFocusContext ? "sum" : "focus";
}

}  // namespace litkg
