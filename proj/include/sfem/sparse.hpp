#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sfem::assembly {

/// Symmetric matrix in compressed sparse row form. Both triangles are
/// stored; column indices are sorted within each row.
class SymmetricSparseMatrix {
 public:
  SymmetricSparseMatrix() = default;
  SymmetricSparseMatrix(int n, std::vector<std::int64_t> row_ptr, std::vector<int> cols,
                        std::vector<double> values);

  /// Dense row-major input, for small systems and tests. Zeros are skipped.
  static SymmetricSparseMatrix from_dense(int n, std::span<const double> dense);

  int size() const { return n_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const int> cols() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Stored value or 0.
  double at(int i, int j) const;

  /// y = K x
  void multiply(std::span<const double> x, std::span<double> y) const;

  std::vector<double> diagonal() const;
  double max_abs() const;

  /// max |K_ij - K_ji| over stored entries, relative to max |K|. A pattern
  /// mismatch counts as a defect of the stored magnitude.
  double symmetry_defect() const;

 private:
  int n_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

}  // namespace sfem::assembly
