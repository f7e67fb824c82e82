#pragma once

// Sparse matrices and the direct solver used for every assembled system.
// Systems are reordered with reverse Cuthill-McKee and factored in banded
// form: Cholesky for symmetric positive definite matrices, LU with scaled
// partial pivoting otherwise.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sblfem::linalg {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Duplicate triplets are summed in a fixed
/// order, so assembly is reproducible bit for bit.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_index() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry (i, j), zero if not stored.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double frobenius() const;
  /// max |a_ij - a_ji| over stored entries.
  double max_asymmetry() const;
  /// Row-major dense copy (tests and small diagnostics only).
  std::vector<double> to_dense() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  bool symmetric = false;  ///< permits a Cholesky factorization

  std::size_t size() const { return matrix.rows(); }
};

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(std::size_t pivot, double ratio);
  std::size_t pivot() const { return pivot_; }

 private:
  std::size_t pivot_;
};

class NonFiniteEntryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pivots whose magnitude relative to the row scale falls below this are
/// reported as singular.
inline constexpr double kPivotThreshold = 1e-14;

/// Solve A x = b. Throws SingularMatrixError, NonFiniteEntryError, or
/// std::runtime_error if the residual cannot be brought below 1e-10.
std::vector<double> solve_direct(const SparseSystem& system);

/// ||Ax - b|| / (||A||_F ||x|| + ||b||).
double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b);

/// Reverse Cuthill-McKee ordering of the symmetrized sparsity pattern:
/// perm[k] = original index placed at position k.
std::vector<std::size_t> reverse_cuthill_mckee(const CsrMatrix& a);

/// Half-bandwidth max |i - j| over stored entries after applying perm.
std::size_t bandwidth(const CsrMatrix& a, std::span<const std::size_t> perm);

}  // namespace sblfem::linalg
