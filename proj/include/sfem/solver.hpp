#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sfem/sparse.hpp"

namespace sfem::solver {

using assembly::SymmetricSparseMatrix;

/// Conjugate gradients with diagonal scaling. The tolerance applies to
/// ||F - K d|| / ||F||; a non-positive max_iterations means "system size".
struct CgSettings {
  double tolerance = 1.0e-10;
  int max_iterations = 0;
  /// Keep every k-th relative residual in the history (0 disables it).
  int history_stride = 1;
};

struct ResidualSample {
  int iteration;
  double relative_residual;
};

struct SolveReport {
  bool converged = false;
  /// p^T K p <= 0 met; the matrix is not positive definite on the Krylov space.
  bool breakdown = false;
  int iterations = 0;
  int max_iterations = 0;
  double relative_residual = 0.0;
  std::vector<ResidualSample> history;
  double seconds = 0.0;
};

struct CgResult {
  std::vector<double> solution;
  SolveReport report;
};

/// Applies M^{-1} r with M = diag(K). Throws PreconditionerError on a
/// non-positive diagonal entry.
class DiagonalPreconditioner {
 public:
  explicit DiagonalPreconditioner(const SymmetricSparseMatrix& k);

  void apply(std::span<const double> r, std::span<double> z) const;
  std::span<const double> inverse_diagonal() const { return inv_diag_; }

 private:
  std::vector<double> inv_diag_;
};

/// Returns the last iterate when not converged. Throws
/// NumericalBreakdownError on non-finite values.
CgResult cg_solve(const SymmetricSparseMatrix& k, std::span<const double> f,
                  const CgSettings& settings = {});

enum class Definiteness { kPositiveDefinite, kNotPositiveDefinite };

struct SpdVerdict {
  Definiteness verdict = Definiteness::kPositiveDefinite;
  /// 1-based elimination step of the first failing pivot (0 when PD).
  int pivot_step = 0;
  /// Matrix row eliminated at that step (-1 when PD).
  int pivot_row = -1;
  double pivot_value = 0.0;
  double tolerance = 0.0;

  bool positive_definite() const { return verdict == Definiteness::kPositiveDefinite; }
};

struct CholeskySettings {
  /// Pivots <= this times max diag(K) fail.
  double relative_pivot_tolerance = 1e-12;
  /// Upper bound on stored profile entries (doubles).
  std::size_t max_profile_entries = std::size_t{300} * 1000 * 1000;
};

/// Row-oriented Cholesky factorization in profile storage after a reverse
/// Cuthill-McKee reordering. Throws SizeLimitError when the profile would
/// exceed the configured size.
SpdVerdict cholesky_spd_test(const SymmetricSparseMatrix& k, const CholeskySettings& settings = {});

/// Reverse Cuthill-McKee ordering of the matrix graph: order[new] = old.
std::vector<int> reverse_cuthill_mckee(const SymmetricSparseMatrix& k);

/// Number of doubles a profile factorization needs under `order`.
std::size_t profile_size(const SymmetricSparseMatrix& k, std::span<const int> order);

}  // namespace sfem::solver
