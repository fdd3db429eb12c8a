#include "sfem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "sfem/error.hpp"

namespace sfem::solver {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

DiagonalPreconditioner::DiagonalPreconditioner(const SymmetricSparseMatrix& k) {
  const auto d = k.diagonal();
  inv_diag_.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      throw PreconditionerError("diagonal scaling: non-positive diagonal entry " +
                                std::to_string(d[i]) + " at row " + std::to_string(i));
    }
    inv_diag_[i] = 1.0 / d[i];
  }
}

void DiagonalPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
}

CgResult cg_solve(const SymmetricSparseMatrix& k, std::span<const double> f,
                  const CgSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  const int n = k.size();
  if (static_cast<int>(f.size()) != n) {
    throw Error("cg_solve: matrix size " + std::to_string(n) + " but right-hand side size " +
                std::to_string(f.size()));
  }
  CgResult out;
  out.solution.assign(n, 0.0);
  SolveReport& rep = out.report;
  rep.max_iterations = settings.max_iterations > 0 ? settings.max_iterations : n;

  const double fnorm = std::sqrt(dot(f, f));
  auto finish = [&] {
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (fnorm == 0.0) {
    rep.converged = true;
    finish();
    return out;
  }
  if (!std::isfinite(fnorm)) throw NumericalBreakdownError("cg_solve: non-finite right-hand side", 0);

  const DiagonalPreconditioner prec(k);
  auto& d = out.solution;
  std::vector<double> r(f.begin(), f.end()), z(n), p(n), kp(n);
  prec.apply(r, z);
  p = z;
  double rz = dot(r, z);
  double rel = 1.0;
  auto record = [&](int it, double value) {
    if (settings.history_stride > 0 && it % settings.history_stride == 0) {
      rep.history.push_back({it, value});
    }
  };
  record(0, rel);

  // Relative residual from the true residual F - K d.
  auto true_residual = [&] {
    k.multiply(d, kp);
    for (int i = 0; i < n; ++i) r[i] = f[i] - kp[i];
    return std::sqrt(dot(r, r)) / fnorm;
  };

  int it = 0;
  while (it < rep.max_iterations) {
    k.multiply(p, kp);
    const double pkp = dot(p, kp);
    if (!std::isfinite(pkp)) throw NumericalBreakdownError("cg_solve: non-finite p^T K p", it + 1);
    if (pkp <= 0.0) {
      rep.breakdown = true;
      break;
    }
    const double alpha = rz / pkp;
    for (int i = 0; i < n; ++i) {
      d[i] += alpha * p[i];
      r[i] -= alpha * kp[i];
    }
    ++it;
    rel = std::sqrt(dot(r, r)) / fnorm;
    if (!std::isfinite(rel)) throw NumericalBreakdownError("cg_solve: non-finite residual", it);
    record(it, rel);
    if (rel <= settings.tolerance) {
      // Confirm with the true residual; restart from it if the recurrence drifted.
      rel = true_residual();
      if (rel <= settings.tolerance) {
        rep.converged = true;
        break;
      }
      prec.apply(r, z);
      p = z;
      rz = dot(r, z);
      continue;
    }
    prec.apply(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.iterations = it;
  if (!rep.converged) rel = true_residual();
  rep.relative_residual = rel;
  finish();
  return out;
}

// ---------------------------------------------------------------------------

std::vector<int> reverse_cuthill_mckee(const SymmetricSparseMatrix& k) {
  const int n = k.size();
  const auto ptr = k.row_ptr();
  const auto cols = k.cols();
  auto degree = [&](int i) { return static_cast<int>(ptr[i + 1] - ptr[i]); };

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<int> level(n, 0);

  // Breadth-first search from `root`; returns visited nodes in CM order.
  auto bfs = [&](int root, std::vector<char>& s, std::vector<int>& out) {
    std::deque<int> queue{root};
    s[root] = 1;
    level[root] = 0;
    std::vector<int> nbrs;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      out.push_back(v);
      nbrs.clear();
      for (auto q = ptr[v]; q < ptr[v + 1]; ++q) {
        const int w = cols[q];
        if (!s[w]) {
          s[w] = 1;
          level[w] = level[v] + 1;
          nbrs.push_back(w);
        }
      }
      std::ranges::sort(nbrs, [&](int a, int b) {
        return degree(a) != degree(b) ? degree(a) < degree(b) : a < b;
      });
      queue.insert(queue.end(), nbrs.begin(), nbrs.end());
    }
  };

  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    // Pseudo-peripheral root: repeat BFS from a minimum-degree node of the
    // deepest level while the eccentricity grows.
    int root = start;
    int depth = -1;
    for (int pass = 0; pass < 8; ++pass) {
      std::vector<int> visit;
      std::vector<char> scratch = seen;
      bfs(root, scratch, visit);
      const int d = level[visit.back()];
      if (d <= depth) break;
      depth = d;
      int best = visit.back();
      for (int v : visit) {
        if (level[v] == d && degree(v) < degree(best)) best = v;
      }
      root = best;
    }
    bfs(root, seen, order);
  }
  std::ranges::reverse(order);
  return order;
}

std::size_t profile_size(const SymmetricSparseMatrix& k, std::span<const int> order) {
  const int n = k.size();
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  const auto ptr = k.row_ptr();
  const auto cols = k.cols();
  std::size_t total = 0;
  for (int i = 0; i < n; ++i) {
    const int old = order[i];
    int first = i;
    for (auto q = ptr[old]; q < ptr[old + 1]; ++q) first = std::min(first, pos[cols[q]]);
    total += static_cast<std::size_t>(i - first + 1);
  }
  return total;
}

SpdVerdict cholesky_spd_test(const SymmetricSparseMatrix& k, const CholeskySettings& settings) {
  const int n = k.size();
  SpdVerdict verdict;
  const auto diag = k.diagonal();
  const double max_diag = n == 0 ? 0.0 : *std::ranges::max_element(diag);
  verdict.tolerance = settings.relative_pivot_tolerance * max_diag;
  if (n == 0) return verdict;

  const auto order = reverse_cuthill_mckee(k);
  const std::size_t entries = profile_size(k, order);
  if (entries > settings.max_profile_entries) {
    throw SizeLimitError("cholesky_spd_test: profile needs " + std::to_string(entries) +
                         " entries (limit " + std::to_string(settings.max_profile_entries) +
                         "); use a smaller mesh");
  }
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;

  // Row i of L stored densely from column first[i] to i.
  const auto ptr = k.row_ptr();
  const auto cols = k.cols();
  const auto vals = k.values();
  std::vector<int> first(n);
  std::vector<std::size_t> start(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    const int old = order[i];
    int f = i;
    for (auto q = ptr[old]; q < ptr[old + 1]; ++q) f = std::min(f, pos[cols[q]]);
    first[i] = f;
    start[i + 1] = start[i] + static_cast<std::size_t>(i - f + 1);
  }
  std::vector<double> l(start[n], 0.0);
  for (int i = 0; i < n; ++i) {
    const int old = order[i];
    for (auto q = ptr[old]; q < ptr[old + 1]; ++q) {
      const int j = pos[cols[q]];
      if (j <= i) l[start[i] + (j - first[i])] = vals[q];
    }
  }

  for (int i = 0; i < n; ++i) {
    double* li = l.data() + start[i];
    const int fi = first[i];
    for (int j = fi; j < i; ++j) {
      const double* lj = l.data() + start[j];
      const int fj = first[j];
      const int from = std::max(fi, fj);
      double s = 0.0;
      const double* a = li + (from - fi);
      const double* b = lj + (from - fj);
      for (int m = 0; m < j - from; ++m) s += a[m] * b[m];
      li[j - fi] = (li[j - fi] - s) / lj[j - fj];
    }
    double s = 0.0;
    for (int m = 0; m < i - fi; ++m) s += li[m] * li[m];
    const double pivot = li[i - fi] - s;
    if (!(pivot > verdict.tolerance)) {
      verdict.verdict = Definiteness::kNotPositiveDefinite;
      verdict.pivot_step = i + 1;
      verdict.pivot_row = order[i];
      verdict.pivot_value = pivot;
      return verdict;
    }
    li[i - fi] = std::sqrt(pivot);
  }
  return verdict;
}

}  // namespace sfem::solver
