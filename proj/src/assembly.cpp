#include "sfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"

namespace sfem::assembly {

using mesh::Axis;
using mesh::StructuredMesh;

// ---------------------------------------------------------------------------
// DofPartition

DofPartition DofPartition::dirichlet(const mesh::SuperposedModel& model, const ScalarField& g) {
  const auto& gm = model.global();
  const auto& lm = model.local();
  DofPartition p;
  p.global_row.assign(gm.num_dofs(), kConstrained);
  p.global_value.assign(gm.num_dofs(), 0.0);
  p.local_row.assign(lm.num_dofs(), kConstrained);
  int row = 0;
  for (int d = 0; d < gm.num_dofs(); ++d) {
    if (gm.on_boundary(d)) {
      p.global_value[d] = g(gm.dof_coordinate(d));
    } else {
      p.global_row[d] = row++;
    }
  }
  p.free_global = row;
  for (int d = 0; d < lm.num_dofs(); ++d) {
    if (!lm.is_boundary(d)) p.local_row[d] = row++;
  }
  p.free_local = row - p.free_global;
  return p;
}

DofPartition DofPartition::unconstrained(const mesh::SuperposedModel& model) {
  DofPartition p;
  const int ng = model.global().num_dofs();
  const int nl = model.local().num_dofs();
  p.global_row.resize(ng);
  p.global_value.assign(ng, 0.0);
  p.local_row.resize(nl);
  for (int d = 0; d < ng; ++d) p.global_row[d] = d;
  for (int d = 0; d < nl; ++d) p.local_row[d] = ng + d;
  p.free_global = ng;
  p.free_local = nl;
  return p;
}

std::vector<int> DofPartition::free_global_dofs() const {
  std::vector<int> out;
  for (int d = 0; d < static_cast<int>(global_row.size()); ++d) {
    if (global_row[d] != kConstrained) out.push_back(d);
  }
  return out;
}

std::vector<int> DofPartition::constrained_global_dofs() const {
  std::vector<int> out;
  for (int d = 0; d < static_cast<int>(global_row.size()); ++d) {
    if (global_row[d] == kConstrained) out.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Range {
  int lo = 0;
  int hi = -1;  // inclusive
};

// For each function of `a`, the contiguous range of functions of `b` whose
// supports overlap it with positive length.
std::vector<Range> interaction(const Axis& a, const Axis& b) {
  const double eps = 1e-10 * std::min(a.h(), b.h());
  std::vector<Range> out(a.num_functions());
  for (int i = 0; i < a.num_functions(); ++i) {
    const auto [ea0, ea1] = a.support(i);
    const double x0 = a.element_lo(ea0);
    const double x1 = a.element_hi(ea1);
    Range r{b.num_functions(), -1};
    for (int j = 0; j < b.num_functions(); ++j) {
      const auto [eb0, eb1] = b.support(j);
      const double overlap = std::min(x1, b.element_hi(eb1)) - std::max(x0, b.element_lo(eb0));
      if (overlap > eps) {
        r.lo = std::min(r.lo, j);
        r.hi = std::max(r.hi, j);
      }
    }
    out[i] = r;
  }
  return out;
}

// 1D integrals over one interval of a mesh axis: mass and derivative
// products of the supported functions, plus their values at the points for
// source integration.
struct AxisCell {
  int first = 0;
  int count = 0;
  std::vector<double> mass;   // count x count
  std::vector<double> stiff;  // count x count
  std::vector<double> x;      // quadrature abscissae (physical)
  std::vector<double> wj;     // weight * jacobian
  std::vector<double> values; // points x count
};

std::vector<AxisCell> axis_cells(const Axis& axis, const quadrature::GaussRule1D& rule) {
  std::vector<AxisCell> cells(axis.elements());
  const int nq = static_cast<int>(rule.size());
  for (int e = 0; e < axis.elements(); ++e) {
    AxisCell& c = cells[e];
    const double jac = 0.5 * (axis.element_hi(e) - axis.element_lo(e));
    c.count = axis.order() + 1;
    c.mass.assign(c.count * c.count, 0.0);
    c.stiff.assign(c.count * c.count, 0.0);
    c.values.assign(nq * c.count, 0.0);
    for (int q = 0; q < nq; ++q) {
      const double x = axis.map(e, rule.points[q]);
      const auto ev = axis.eval_in_element(e, x);
      c.first = ev.first;
      const double w = rule.weights[q] * jac;
      c.x.push_back(x);
      c.wj.push_back(w);
      for (int i = 0; i < c.count; ++i) {
        c.values[q * c.count + i] = ev.values[i];
        for (int j = 0; j < c.count; ++j) {
          c.mass[i * c.count + j] += w * ev.values[i] * ev.values[j];
          c.stiff[i * c.count + j] += w * ev.derivs[i] * ev.derivs[j];
        }
      }
    }
  }
  return cells;
}

// Global-by-local 1D integrals over one local interval. The global window
// is the union of the windows located at each point.
struct CouplingCell {
  int global_first = 0;
  int global_count = 0;
  int local_first = 0;
  int local_count = 0;
  std::vector<double> mass;   // global_count x local_count
  std::vector<double> stiff;  // global_count x local_count
};

std::vector<CouplingCell> coupling_cells(const Axis& global, const Axis& local,
                                         const quadrature::GaussRule1D& rule) {
  std::vector<CouplingCell> cells(local.elements());
  const int nq = static_cast<int>(rule.size());
  std::vector<basis::Eval1D> gev(nq);
  std::vector<basis::Eval1D> lev(nq);
  std::vector<double> wj(nq);
  for (int e = 0; e < local.elements(); ++e) {
    CouplingCell& c = cells[e];
    const double jac = 0.5 * (local.element_hi(e) - local.element_lo(e));
    int gmin = global.num_functions();
    int gmax = -1;
    for (int q = 0; q < nq; ++q) {
      const double x = local.map(e, rule.points[q]);
      lev[q] = local.eval_in_element(e, x);
      const auto loc = global.locate(x);
      gev[q] = global.eval_in_element(loc.element, x);
      wj[q] = rule.weights[q] * jac;
      gmin = std::min(gmin, gev[q].first);
      gmax = std::max(gmax, gev[q].first + gev[q].count - 1);
    }
    c.global_first = gmin;
    c.global_count = gmax - gmin + 1;
    c.local_first = lev[0].first;
    c.local_count = lev[0].count;
    c.mass.assign(c.global_count * c.local_count, 0.0);
    c.stiff.assign(c.global_count * c.local_count, 0.0);
    for (int q = 0; q < nq; ++q) {
      const int off = gev[q].first - gmin;
      for (int i = 0; i < gev[q].count; ++i) {
        for (int j = 0; j < c.local_count; ++j) {
          c.mass[(off + i) * c.local_count + j] += wj[q] * gev[q].values[i] * lev[q].values[j];
          c.stiff[(off + i) * c.local_count + j] += wj[q] * gev[q].derivs[i] * lev[q].derivs[j];
        }
      }
    }
  }
  return cells;
}

}  // namespace

Coupling1D coupling_1d(const Axis& global, const Axis& local, int quad_points) {
  Coupling1D out;
  out.global_functions = global.num_functions();
  out.local_functions = local.num_functions();
  out.mass.assign(out.global_functions * out.local_functions, 0.0);
  out.stiff.assign(out.mass.size(), 0.0);
  for (const auto& c : coupling_cells(global, local, quadrature::gauss_rule(quad_points))) {
    for (int i = 0; i < c.global_count; ++i) {
      for (int j = 0; j < c.local_count; ++j) {
        const int k = (c.global_first + i) * out.local_functions + c.local_first + j;
        out.mass[k] += c.mass[i * c.local_count + j];
        out.stiff[k] += c.stiff[i * c.local_count + j];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SystemAssembler::Impl {
  const mesh::SuperposedModel& model;
  const DofPartition& part;
  int n_global;  // global mesh DOFs; local full ids are offset by this
  int n;
  std::vector<std::int64_t> row_ptr;
  std::vector<int> cols;
  std::vector<double> values;
  std::vector<double> load;

  Impl(const mesh::SuperposedModel& m, const DofPartition& p)
      : model(m), part(p), n_global(m.global().num_dofs()), n(p.size()) {
    if (static_cast<int>(p.global_row.size()) != m.global().num_dofs() ||
        static_cast<int>(p.local_row.size()) != m.local().num_dofs()) {
      throw AssemblyError("SystemAssembler: partition does not match the model");
    }
    build_pattern();
    load.assign(n, 0.0);
  }

  int row_of(int full) const {
    return full < n_global ? part.global_row[full] : part.local_row[full - n_global];
  }
  double prescribed(int full) const {
    return full < n_global ? part.global_value[full] : 0.0;
  }

  void build_pattern() {
    const auto& gm = model.global();
    const auto& lm = model.local();
    std::array<std::vector<Range>, 3> gg, gl, lg, ll;
    for (int a = 0; a < 3; ++a) {
      gg[a] = interaction(gm.axis(a), gm.axis(a));
      gl[a] = interaction(gm.axis(a), lm.axis(a));
      lg[a] = interaction(lm.axis(a), gm.axis(a));
      ll[a] = interaction(lm.axis(a), lm.axis(a));
    }
    row_ptr.assign(1, 0);
    row_ptr.reserve(n + 1);

    auto emit = [&](const StructuredMesh& cm, const std::array<Range, 3>& r, int offset) {
      for (int i = r[0].lo; i <= r[0].hi; ++i) {
        for (int j = r[1].lo; j <= r[1].hi; ++j) {
          for (int k = r[2].lo; k <= r[2].hi; ++k) {
            const int s = row_of(offset + cm.dof_index(i, j, k));
            if (s != DofPartition::kConstrained) cols.push_back(s);
          }
        }
      }
    };

    std::vector<std::pair<int, int>> rows;  // (system row, full id)
    rows.reserve(n);
    for (int d = 0; d < gm.num_dofs(); ++d) {
      if (part.global_row[d] != DofPartition::kConstrained) rows.emplace_back(part.global_row[d], d);
    }
    for (int d = 0; d < lm.num_dofs(); ++d) {
      if (part.local_row[d] != DofPartition::kConstrained) {
        rows.emplace_back(part.local_row[d], n_global + d);
      }
    }
    std::ranges::sort(rows);
    for (int r = 0; r < n; ++r) {
      if (rows[r].first != r) throw AssemblyError("SystemAssembler: partition rows not contiguous");
      const int full = rows[r].second;
      if (full < n_global) {
        const auto t = gm.dof_triple(full);
        emit(gm, {gg[0][t[0]], gg[1][t[1]], gg[2][t[2]]}, 0);
        emit(lm, {gl[0][t[0]], gl[1][t[1]], gl[2][t[2]]}, n_global);
      } else {
        const auto t = lm.dof_triple(full - n_global);
        emit(gm, {lg[0][t[0]], lg[1][t[1]], lg[2][t[2]]}, 0);
        emit(lm, {ll[0][t[0]], ll[1][t[1]], ll[2][t[2]]}, n_global);
      }
      row_ptr.push_back(static_cast<std::int64_t>(cols.size()));
    }
    values.assign(cols.size(), 0.0);
  }

  void add(int row_full, int col_full, double v) {
    const int r = row_of(row_full);
    if (r == DofPartition::kConstrained) return;
    const int c = row_of(col_full);
    if (c == DofPartition::kConstrained) {
      load[r] -= v * prescribed(col_full);
      return;
    }
    const auto begin = cols.begin() + row_ptr[r];
    const auto end = cols.begin() + row_ptr[r + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) {
      throw AssemblyError("SystemAssembler: entry (" + std::to_string(r) + ", " +
                          std::to_string(c) + ") outside the sparsity pattern");
    }
    values[it - cols.begin()] += v;
  }

  void add_load(int row_full, double v) {
    const int r = row_of(row_full);
    if (r != DofPartition::kConstrained) load[r] += v;
  }

  // Stiffness and source over every element of one mesh.
  void assemble_mesh(const StructuredMesh& m, int offset, int quad_points,
                     const ScalarField& source) {
    const auto rule = quadrature::gauss_rule(quad_points);
    const int nq = quad_points;
    std::array<std::vector<AxisCell>, 3> cells;
    for (int a = 0; a < 3; ++a) cells[a] = axis_cells(m.axis(a), rule);

    const int c1 = m.spec().order + 1;
    const int local = c1 * c1 * c1;
    std::vector<int> dofs(local);
    std::vector<double> fz(nq * nq * c1), fyz(nq * c1 * c1), fe(local);

    const int ne = m.elements_per_axis();
    for (int ex = 0; ex < ne; ++ex) {
      const AxisCell& X = cells[0][ex];
      for (int ey = 0; ey < ne; ++ey) {
        const AxisCell& Y = cells[1][ey];
        for (int ez = 0; ez < ne; ++ez) {
          const AxisCell& Z = cells[2][ez];
          for (int a = 0, l = 0; a < c1; ++a) {
            for (int b = 0; b < c1; ++b) {
              for (int c = 0; c < c1; ++c, ++l) {
                dofs[l] = offset + m.dof_index(X.first + a, Y.first + b, Z.first + c);
              }
            }
          }
          for (int a = 0, l = 0; a < c1; ++a) {
            for (int b = 0; b < c1; ++b) {
              for (int c = 0; c < c1; ++c, ++l) {
                for (int a2 = 0, l2 = 0; a2 < c1; ++a2) {
                  const double mx = X.mass[a * c1 + a2];
                  const double dx = X.stiff[a * c1 + a2];
                  for (int b2 = 0; b2 < c1; ++b2) {
                    const double my = Y.mass[b * c1 + b2];
                    const double dy = Y.stiff[b * c1 + b2];
                    for (int c2 = 0; c2 < c1; ++c2, ++l2) {
                      const double mz = Z.mass[c * c1 + c2];
                      const double dz = Z.stiff[c * c1 + c2];
                      const double v = dx * my * mz + mx * dy * mz + mx * my * dz;
                      if (v != 0.0) add(dofs[l], dofs[l2], v);
                    }
                  }
                }
              }
            }
          }
          if (!source) continue;
          // Source integral, contracted one axis at a time.
          for (int qx = 0; qx < nq; ++qx) {
            for (int qy = 0; qy < nq; ++qy) {
              for (int c = 0; c < c1; ++c) fz[(qx * nq + qy) * c1 + c] = 0.0;
              for (int qz = 0; qz < nq; ++qz) {
                const double f = source({X.x[qx], Y.x[qy], Z.x[qz]}) * Z.wj[qz];
                for (int c = 0; c < c1; ++c) {
                  fz[(qx * nq + qy) * c1 + c] += f * Z.values[qz * c1 + c];
                }
              }
            }
          }
          std::fill(fyz.begin(), fyz.end(), 0.0);
          for (int qx = 0; qx < nq; ++qx) {
            for (int qy = 0; qy < nq; ++qy) {
              for (int b = 0; b < c1; ++b) {
                const double wy = Y.wj[qy] * Y.values[qy * c1 + b];
                for (int c = 0; c < c1; ++c) {
                  fyz[(qx * c1 + b) * c1 + c] += wy * fz[(qx * nq + qy) * c1 + c];
                }
              }
            }
          }
          std::fill(fe.begin(), fe.end(), 0.0);
          for (int qx = 0; qx < nq; ++qx) {
            for (int a = 0; a < c1; ++a) {
              const double wx = X.wj[qx] * X.values[qx * c1 + a];
              for (int bc = 0; bc < c1 * c1; ++bc) fe[a * c1 * c1 + bc] += wx * fyz[qx * c1 * c1 + bc];
            }
          }
          for (int l = 0; l < local; ++l) add_load(dofs[l], fe[l]);
        }
      }
    }
  }

  void assemble_coupling(int quad_points) {
    const auto& gm = model.global();
    const auto& lm = model.local();
    const auto rule = quadrature::gauss_rule(quad_points);
    std::array<std::vector<CouplingCell>, 3> cells;
    for (int a = 0; a < 3; ++a) cells[a] = coupling_cells(gm.axis(a), lm.axis(a), rule);

    const int ne = lm.elements_per_axis();
    for (int ex = 0; ex < ne; ++ex) {
      const CouplingCell& X = cells[0][ex];
      for (int ey = 0; ey < ne; ++ey) {
        const CouplingCell& Y = cells[1][ey];
        for (int ez = 0; ez < ne; ++ez) {
          const CouplingCell& Z = cells[2][ez];
          for (int ga = 0; ga < X.global_count; ++ga) {
            for (int gb = 0; gb < Y.global_count; ++gb) {
              for (int gc = 0; gc < Z.global_count; ++gc) {
                const int gdof =
                    gm.dof_index(X.global_first + ga, Y.global_first + gb, Z.global_first + gc);
                for (int la = 0; la < X.local_count; ++la) {
                  const double mx = X.mass[ga * X.local_count + la];
                  const double dx = X.stiff[ga * X.local_count + la];
                  for (int lb = 0; lb < Y.local_count; ++lb) {
                    const double my = Y.mass[gb * Y.local_count + lb];
                    const double dy = Y.stiff[gb * Y.local_count + lb];
                    for (int lc = 0; lc < Z.local_count; ++lc) {
                      const double mz = Z.mass[gc * Z.local_count + lc];
                      const double dz = Z.stiff[gc * Z.local_count + lc];
                      const double v = dx * my * mz + mx * dy * mz + mx * my * dz;
                      if (v == 0.0) continue;
                      const int ldof = n_global + lm.dof_index(X.local_first + la,
                                                               Y.local_first + lb,
                                                               Z.local_first + lc);
                      add(gdof, ldof, v);
                      add(ldof, gdof, v);
                    }
                  }
                }
              }
            }
          }
        }
      }
    }
  }
};

SystemAssembler::SystemAssembler(const mesh::SuperposedModel& model,
                                 const DofPartition& partition)
    : impl_(std::make_unique<Impl>(model, partition)) {}

SystemAssembler::~SystemAssembler() = default;
SystemAssembler::SystemAssembler(SystemAssembler&&) noexcept = default;
SystemAssembler& SystemAssembler::operator=(SystemAssembler&&) noexcept = default;

void SystemAssembler::assemble_global(int quad_points, const ScalarField& source) {
  impl_->assemble_mesh(impl_->model.global(), 0, quad_points, source);
}

void SystemAssembler::assemble_local(int quad_points, const ScalarField& source) {
  impl_->assemble_mesh(impl_->model.local(), impl_->n_global, quad_points, source);
}

void SystemAssembler::assemble_coupling(int quad_points) {
  impl_->assemble_coupling(quad_points);
}

LinearSystem SystemAssembler::finalize() && {
  Impl& s = *impl_;
  if (static_cast<int>(s.load.size()) != s.n ||
      static_cast<int>(s.row_ptr.size()) != s.n + 1) {
    throw AssemblyError("finalize: dimension mismatch between matrix and load vector");
  }
  LinearSystem out{SymmetricSparseMatrix(s.n, std::move(s.row_ptr), std::move(s.cols),
                                         std::move(s.values)),
                   std::move(s.load)};
  impl_.reset();
  return out;
}

LinearSystem assemble_system(const mesh::SuperposedModel& model, const DofPartition& partition,
                             int quad_points, const ScalarField& source) {
  SystemAssembler assembler(model, partition);
  assembler.assemble_global(quad_points, source);
  assembler.assemble_local(quad_points, source);
  assembler.assemble_coupling(quad_points);
  return std::move(assembler).finalize();
}

}  // namespace sfem::assembly
