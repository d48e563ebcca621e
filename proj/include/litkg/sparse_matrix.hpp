#pragma once
// Sparse non-negative co-occurrence matrices and the merge operations on them.
//
// Cells are (focus, context) pairs. A "column" is the slice of cells sharing
// one focus term, i.e. the context distribution of that term.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "litkg/vocabulary.hpp"

namespace litkg {

struct Cell {
    TermId focus;
    TermId context;
    double weight;

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Cells sorted by (focus, context), each strictly positive and finite, with
/// both indices below dim().
class SparseMatrix {
public:
    SparseMatrix() = default;
    explicit SparseMatrix(std::size_t dim) : dim_(dim) {}

    /// Takes cells in any order; duplicates are summed in input order.
    /// Throws on zero/negative/non-finite weights or out-of-range ids.
    static SparseMatrix from_cells(std::size_t dim, std::vector<Cell> cells);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t nnz() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }
    std::span<const Cell> cells() const noexcept { return cells_; }

    /// Weight at (focus, context), 0 if absent.
    double at(TermId focus, TermId context) const;

    /// Same cells over a larger id space (new ids have no cells).
    SparseMatrix with_dim(std::size_t dim) const;

    SparseMatrix transposed() const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Cell> cells_;
};

/// Divides every column by its sum.
SparseMatrix normalize_columns(const SparseMatrix& m);

enum class KthMode { Multiset, Distinct };

/// Divides all entries by the k'-th largest entry, k' = min(k, available).
/// In Multiset mode duplicates occupy separate ranks; in Distinct mode ranks
/// run over distinct values. Throws EmptyMatrix.
SparseMatrix scale_by_kth_largest(const SparseMatrix& m, std::size_t k, KthMode mode = KthMode::Multiset);

/// The divisor scale_by_kth_largest would use.
double kth_largest(const SparseMatrix& m, std::size_t k, KthMode mode = KthMode::Multiset);

/// Cell-wise sum. Throws DimensionMismatch.
SparseMatrix merge_sum(const SparseMatrix& a, const SparseMatrix& b);

/// N-ary cell-wise sum. Values of a cell are added in ascending order, so the
/// result does not depend on the order of `parts`.
SparseMatrix merge_sum(std::span<const SparseMatrix> parts);

/// `COOC v1 dim=<N> nnz=<M>` header, then `focus<TAB>context<TAB>weight` rows
/// with weights in shortest round-trip form.
void write_matrix(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_matrix(std::istream& in);

}  // namespace litkg
