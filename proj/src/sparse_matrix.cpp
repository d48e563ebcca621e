#include "litkg/sparse_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include "litkg/error.hpp"

namespace litkg {

namespace {

bool cell_less(const Cell& a, const Cell& b) {
    return a.focus != b.focus ? a.focus < b.focus : a.context < b.context;
}

bool same_cell(const Cell& a, const Cell& b) { return a.focus == b.focus && a.context == b.context; }

void check_cell(const Cell& c, std::size_t dim) {
    if (c.focus >= dim || c.context >= dim) {
        throw DimensionMismatch("cell (" + std::to_string(c.focus) + ", " + std::to_string(c.context) +
                                ") outside dim " + std::to_string(dim));
    }
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
        throw Error("cell weight must be positive and finite");
    }
}

}  // namespace

SparseMatrix SparseMatrix::from_cells(std::size_t dim, std::vector<Cell> cells) {
    for (const Cell& c : cells) check_cell(c, dim);
    std::stable_sort(cells.begin(), cells.end(), cell_less);
    SparseMatrix m(dim);
    m.cells_.reserve(cells.size());
    for (const Cell& c : cells) {
        if (!m.cells_.empty() && same_cell(m.cells_.back(), c)) {
            m.cells_.back().weight += c.weight;
        } else {
            m.cells_.push_back(c);
        }
    }
    return m;
}

double SparseMatrix::at(TermId focus, TermId context) const {
    Cell key{focus, context, 0.0};
    auto it = std::lower_bound(cells_.begin(), cells_.end(), key, cell_less);
    return it != cells_.end() && same_cell(*it, key) ? it->weight : 0.0;
}

SparseMatrix SparseMatrix::with_dim(std::size_t dim) const {
    if (dim < dim_) throw DimensionMismatch("cannot shrink matrix dimension");
    SparseMatrix m = *this;
    m.dim_ = dim;
    return m;
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<Cell> cells;
    cells.reserve(cells_.size());
    for (const Cell& c : cells_) cells.push_back(Cell{c.context, c.focus, c.weight});
    return from_cells(dim_, std::move(cells));
}

SparseMatrix normalize_columns(const SparseMatrix& m) {
    std::vector<Cell> cells(m.cells().begin(), m.cells().end());
    std::size_t begin = 0;
    while (begin < cells.size()) {
        std::size_t end = begin;
        double total = 0.0;
        while (end < cells.size() && cells[end].focus == cells[begin].focus) total += cells[end++].weight;
        for (std::size_t i = begin; i < end; ++i) cells[i].weight /= total;
        begin = end;
    }
    return SparseMatrix::from_cells(m.dim(), std::move(cells));
}

double kth_largest(const SparseMatrix& m, std::size_t k, KthMode mode) {
    if (m.empty()) throw EmptyMatrix("cannot scale an empty matrix");
    if (k == 0) throw Error("k must be positive");
    std::vector<double> values;
    values.reserve(m.nnz());
    for (const Cell& c : m.cells()) values.push_back(c.weight);
    if (mode == KthMode::Distinct) {
        std::sort(values.begin(), values.end(), std::greater<>());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        return values[std::min(k, values.size()) - 1];
    }
    std::size_t rank = std::min(k, values.size()) - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end(),
                     std::greater<>());
    return values[rank];
}

SparseMatrix scale_by_kth_largest(const SparseMatrix& m, std::size_t k, KthMode mode) {
    const double divisor = kth_largest(m, k, mode);
    std::vector<Cell> cells(m.cells().begin(), m.cells().end());
    for (Cell& c : cells) c.weight /= divisor;
    return SparseMatrix::from_cells(m.dim(), std::move(cells));
}

SparseMatrix merge_sum(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("merge of dim " + std::to_string(a.dim()) + " and dim " + std::to_string(b.dim()));
    }
    std::vector<Cell> out;
    out.reserve(a.nnz() + b.nnz());
    auto ia = a.cells().begin();
    auto ib = b.cells().begin();
    while (ia != a.cells().end() || ib != b.cells().end()) {
        if (ib == b.cells().end() || (ia != a.cells().end() && cell_less(*ia, *ib))) {
            out.push_back(*ia++);
        } else if (ia == a.cells().end() || cell_less(*ib, *ia)) {
            out.push_back(*ib++);
        } else {
            out.push_back(Cell{ia->focus, ia->context, ia->weight + ib->weight});
            ++ia;
            ++ib;
        }
    }
    return SparseMatrix::from_cells(a.dim(), std::move(out));
}

SparseMatrix merge_sum(std::span<const SparseMatrix> parts) {
    if (parts.empty()) return SparseMatrix{};
    std::size_t dim = parts.front().dim();
    std::vector<Cell> all;
    for (const SparseMatrix& p : parts) {
        if (p.dim() != dim) throw DimensionMismatch("merge of matrices with different dims");
        all.insert(all.end(), p.cells().begin(), p.cells().end());
    }
    std::sort(all.begin(), all.end(), [](const Cell& a, const Cell& b) {
        if (!same_cell(a, b)) return cell_less(a, b);
        return a.weight < b.weight;
    });
    return SparseMatrix::from_cells(dim, std::move(all));
}

void write_matrix(std::ostream& out, const SparseMatrix& m) {
    out << "COOC v1 dim=" << m.dim() << " nnz=" << m.nnz() << '\n';
    char buf[64];
    for (const Cell& c : m.cells()) {
        auto res = std::to_chars(buf, buf + sizeof(buf), c.weight);
        out << c.focus << '\t' << c.context << '\t' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
            << '\n';
    }
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::size_t lineno) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error("matrix line " + std::to_string(lineno) + ": bad number '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

SparseMatrix read_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("matrix file: missing header");
    constexpr std::string_view kMagic = "COOC v1 dim=";
    std::string_view header(line);
    auto nnz_pos = header.find(" nnz=");
    if (!header.starts_with(kMagic) || nnz_pos == std::string_view::npos) {
        throw Error("matrix file: bad header '" + line + "'");
    }
    auto dim = parse_number<std::size_t>(header.substr(kMagic.size(), nnz_pos - kMagic.size()), 1);
    auto nnz = parse_number<std::size_t>(header.substr(nnz_pos + 5), 1);

    std::vector<Cell> cells;
    cells.reserve(nnz);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string_view row(line);
        auto t1 = row.find('\t');
        auto t2 = t1 == std::string_view::npos ? t1 : row.find('\t', t1 + 1);
        if (t2 == std::string_view::npos) throw Error("matrix line " + std::to_string(lineno) + ": expected 3 fields");
        cells.push_back(Cell{parse_number<TermId>(row.substr(0, t1), lineno),
                             parse_number<TermId>(row.substr(t1 + 1, t2 - t1 - 1), lineno),
                             parse_number<double>(row.substr(t2 + 1), lineno)});
    }
    if (cells.size() != nnz) throw Error("matrix file: header says " + std::to_string(nnz) + " cells, found " +
                                         std::to_string(cells.size()));
    auto m = SparseMatrix::from_cells(dim, std::move(cells));
    if (m.nnz() != nnz) throw Error("matrix file: duplicate cells");
    return m;
}

}  // namespace litkg
