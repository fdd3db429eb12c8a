#include "sfem/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "sfem/error.hpp"

namespace sfem::assembly {

SymmetricSparseMatrix::SymmetricSparseMatrix(int n, std::vector<std::int64_t> row_ptr,
                                             std::vector<int> cols, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
  if (static_cast<int>(row_ptr_.size()) != n_ + 1 || cols_.size() != values_.size() ||
      row_ptr_.back() != static_cast<std::int64_t>(cols_.size())) {
    throw AssemblyError("SymmetricSparseMatrix: inconsistent CSR arrays");
  }
}

SymmetricSparseMatrix SymmetricSparseMatrix::from_dense(int n, std::span<const double> dense) {
  if (dense.size() != static_cast<std::size_t>(n) * n) {
    throw AssemblyError("from_dense: size mismatch");
  }
  std::vector<std::int64_t> ptr{0};
  std::vector<int> cols;
  std::vector<double> vals;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = dense[static_cast<std::size_t>(i) * n + j];
      if (v != 0.0) {
        cols.push_back(j);
        vals.push_back(v);
      }
    }
    ptr.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return {n, std::move(ptr), std::move(cols), std::move(vals)};
}

double SymmetricSparseMatrix::at(int i, int j) const {
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? values_[it - cols_.begin()] : 0.0;
}

void SymmetricSparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) sum += values_[k] * x[cols_[k]];
    y[i] = sum;
  }
}

std::vector<double> SymmetricSparseMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

double SymmetricSparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SymmetricSparseMatrix::symmetry_defect() const {
  const double scale = max_abs();
  if (scale == 0.0) return 0.0;
  double defect = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      defect = std::max(defect, std::abs(values_[k] - at(cols_[k], i)));
    }
  }
  return defect / scale;
}

}  // namespace sfem::assembly
