#include <cmath>
#include <vector>

#include <boost/rational.hpp>
#include <gtest/gtest.h>

#include "sfem/assembly.hpp"
#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"
#include "sfem/solver.hpp"
#include "sfem/verify.hpp"

using namespace sfem;
using namespace sfem::assembly;
using mesh::BasisSpec;
using mesh::Box;
using mesh::Case;
using basis::Family;

namespace {

std::vector<double> dense(const SymmetricSparseMatrix& k) {
  const int n = k.size();
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  const auto ptr = k.row_ptr();
  for (int i = 0; i < n; ++i)
    for (auto q = ptr[i]; q < ptr[i + 1]; ++q) d[static_cast<std::size_t>(i) * n + k.cols()[q]] = k.values()[q];
  return d;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Element-by-element 3D Gauss integration without sum factorization: the
// full block matrix over all global and local DOFs.
std::vector<double> brute_force_blocks(const mesh::SuperposedModel& model, int nq) {
  const auto& gm = model.global();
  const auto& lm = model.local();
  const int ng = gm.num_dofs();
  const int n = ng + lm.num_dofs();
  std::vector<double> k(static_cast<std::size_t>(n) * n, 0.0);
  const auto rule = quadrature::tensor3(nq);
  auto accumulate = [&](const mesh::PointBasis& a, int oa, const mesh::PointBasis& b, int ob, double w) {
    for (int i = 0; i < a.size; ++i)
      for (int j = 0; j < b.size; ++j) {
        const double v = w * (a.grads[i][0] * b.grads[j][0] + a.grads[i][1] * b.grads[j][1] +
                              a.grads[i][2] * b.grads[j][2]);
        k[static_cast<std::size_t>(oa + a.dofs[i]) * n + ob + b.dofs[j]] += v;
      }
  };
  const double gj = std::pow(gm.h() / 2, 3);
  for (int e = 0; e < gm.num_elements(); ++e) {
    const auto t = gm.element_triple(e);
    for (const auto& qp : rule.points) {
      const auto x = gm.map(t, qp.xi);
      const auto b = gm.basis_in_element(t, x);
      accumulate(b, 0, b, 0, qp.weight * gj);
    }
  }
  const double lj = std::pow(lm.h() / 2, 3);
  for (int e = 0; e < lm.num_elements(); ++e) {
    const auto t = lm.element_triple(e);
    for (const auto& qp : rule.points) {
      const auto x = lm.map(t, qp.xi);
      const auto bl = lm.basis_in_element(t, x);
      const auto bg = gm.basis_at(x);
      accumulate(bl, ng, bl, ng, qp.weight * lj);
      accumulate(bg, 0, bl, ng, qp.weight * lj);
      accumulate(bl, ng, bg, 0, qp.weight * lj);
    }
  }
  return k;
}

LinearSystem unconstrained_system(const mesh::SuperposedModel& model, int nq) {
  return assemble_system(model, DofPartition::unconstrained(model), nq, {});
}

// Exact polynomial arithmetic for the 1D coupling oracle.
using Q = boost::rational<long long>;
using Poly = std::vector<Q>;  // coefficients, lowest degree first

Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, Q(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}
Poly deriv(const Poly& a) {
  if (a.size() == 1) return {Q(0)};
  Poly d(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * Q(static_cast<long long>(i));
  return d;
}
Q integrate(const Poly& a, Q lo, Q hi) {
  Q s = 0, plo = lo, phi = hi;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * (phi - plo) / Q(static_cast<long long>(i + 1));
    plo *= lo;
    phi *= hi;
  }
  return s;
}
// Lagrange polynomial of node k on [a, b] with p+1 equispaced nodes.
Poly lagrange_poly(int p, int k, Q a, Q b) {
  Poly l{Q(1)};
  const Q xk = a + (b - a) * Q(k, p);
  for (int j = 0; j <= p; ++j) {
    if (j == k) continue;
    const Q xj = a + (b - a) * Q(j, p);
    l = mul(l, Poly{-xj / (xk - xj), Q(1) / (xk - xj)});
  }
  return l;
}

struct ExactCoupling {
  std::vector<std::vector<Q>> mass, stiff;
};

// Piecewise closed-form coupling of C0 Lagrange spaces: global order p on
// ng uniform elements of [g0, g1], local order q on nl elements of [l0, l1].
ExactCoupling exact_coupling(int p, int ng, Q g0, Q g1, int q, int nl, Q l0, Q l1) {
  const int nfg = p * ng + 1, nfl = q * nl + 1;
  ExactCoupling out{std::vector<std::vector<Q>>(nfg, std::vector<Q>(nfl, Q(0))),
                    std::vector<std::vector<Q>>(nfg, std::vector<Q>(nfl, Q(0)))};
  std::vector<Q> cuts;
  for (int e = 0; e <= ng; ++e) cuts.push_back(g0 + (g1 - g0) * Q(e, ng));
  for (int e = 0; e <= nl; ++e) cuts.push_back(l0 + (l1 - l0) * Q(e, nl));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const Q a = cuts[c], b = cuts[c + 1];
    if (a < l0 || b > l1) continue;
    const Q mid = (a + b) / Q(2);
    const int eg = boost::rational_cast<int>((mid - g0) / (g1 - g0) * Q(ng));
    const int el = boost::rational_cast<int>((mid - l0) / (l1 - l0) * Q(nl));
    const Q ga = g0 + (g1 - g0) * Q(eg, ng), gb = g0 + (g1 - g0) * Q(eg + 1, ng);
    const Q la = l0 + (l1 - l0) * Q(el, nl), lb = l0 + (l1 - l0) * Q(el + 1, nl);
    for (int i = 0; i <= p; ++i) {
      const Poly gi = lagrange_poly(p, i, ga, gb);
      for (int j = 0; j <= q; ++j) {
        const Poly lj = lagrange_poly(q, j, la, lb);
        out.mass[p * eg + i][q * el + j] += integrate(mul(gi, lj), a, b);
        out.stiff[p * eg + i][q * el + j] += integrate(mul(deriv(gi), deriv(lj)), a, b);
      }
    }
  }
  return out;
}

double max_coupling_error(const Coupling1D& c, const ExactCoupling& ex) {
  double err = 0.0;
  for (int i = 0; i < c.global_functions; ++i)
    for (int j = 0; j < c.local_functions; ++j) {
      err = std::max(err, std::abs(c.mass_at(i, j) - boost::rational_cast<double>(ex.mass[i][j])));
      err = std::max(err, std::abs(c.stiff_at(i, j) - boost::rational_cast<double>(ex.stiff[i][j])));
    }
  return err;
}

}  // namespace

TEST(Stiffness, UnitCubeTrilinearCornerEntry) {
  const mesh::SuperposedModel model(mesh::GlobalMesh({Family::kLagrange, 1}, Box::cube(0, 1), 1),
                                    mesh::LocalMesh(1, Box::cube(0, 1), 1));
  const auto partition = DofPartition::unconstrained(model);
  SystemAssembler asmb(model, partition);
  asmb.assemble_global(2, {});
  const auto sys = std::move(asmb).finalize();
  for (int c = 0; c < 8; ++c) EXPECT_NEAR(sys.matrix.at(c, c), 1.0 / 3.0, 1e-15);
  // Opposite corners: -1/12; face neighbours: 0; edge-diagonal neighbours: -1/12.
  EXPECT_NEAR(sys.matrix.at(0, 7), -1.0 / 12.0, 1e-15);
  EXPECT_NEAR(sys.matrix.at(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(sys.matrix.at(0, 3), -1.0 / 12.0, 1e-15);
}

TEST(Stiffness, SumFactorizedMatchesBruteForce) {
  struct P {
    BasisSpec g;
    int q;
    Case c;
    int ne;
  };
  for (const auto& t : {P{{Family::kBSpline, 3}, 1, Case::kA, 6}, P{{Family::kBSpline, 2}, 2, Case::kB, 4},
                        P{{Family::kLagrange, 2}, 3, Case::kA, 6}, P{{Family::kLagrange, 1}, 2, Case::kB, 4}}) {
    const auto model = mesh::make_study_model(t.g, t.ne, t.q, t.c);
    const int nq = std::max(t.g.order, t.q) + 2;
    const auto sys = unconstrained_system(model, nq);
    const auto fast = dense(sys.matrix);
    const auto slow = brute_force_blocks(model, nq);
    ASSERT_EQ(fast.size(), slow.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i) diff = std::max(diff, std::abs(fast[i] - slow[i]));
    EXPECT_LE(diff, 1e-12 * max_abs(slow)) << t.g.to_string() << " q=" << t.q;
  }
}

TEST(Stiffness, RowSumsVanishAndCouplingKillsConstants) {
  const auto model = mesh::make_study_model({Family::kBSpline, 2}, 6, 2, Case::kA);
  const auto sys = unconstrained_system(model, 10);
  const int ng = model.global().num_dofs();
  const int n = sys.matrix.size();
  std::vector<double> ones(n, 0.0), y(n);
  std::fill(ones.begin(), ones.begin() + ng, 1.0);
  sys.matrix.multiply(ones, y);
  const double scale = sys.matrix.max_abs();
  for (int i = 0; i < n; ++i) EXPECT_LE(std::abs(y[i]), 1e-12 * scale) << "row " << i;
  EXPECT_LE(sys.matrix.symmetry_defect(), 1e-12);
}

TEST(Stiffness, IdenticalMeshesGiveEqualCouplingAndLocalBlocks) {
  const mesh::SuperposedModel model(mesh::GlobalMesh({Family::kLagrange, 1}, Box::cube(0, 2), 4),
                                    mesh::LocalMesh(1, Box::cube(0, 1), 2));
  const auto sys = unconstrained_system(model, 2);
  const auto& gm = model.global();
  const auto& lm = model.local();
  const int ng = gm.num_dofs();
  for (int a = 0; a < lm.num_dofs(); ++a) {
    const auto ta = lm.dof_triple(a);
    const int ga = gm.dof_index(ta[0], ta[1], ta[2]);
    for (int b = 0; b < lm.num_dofs(); ++b) {
      const auto tb = lm.dof_triple(b);
      const int gb = gm.dof_index(tb[0], tb[1], tb[2]);
      // Global functions extend outside the box, so only interior local
      // nodes have identical restrictions.
      if (lm.is_boundary(a)) continue;
      EXPECT_NEAR(sys.matrix.at(ng + a, gb), sys.matrix.at(ng + a, ng + b), 1e-14);
      EXPECT_NEAR(sys.matrix.at(ga, ng + b), sys.matrix.at(ng + a, ng + b), 1e-14);
    }
  }
}

TEST(Stiffness, SingleLocalElementLeavesNoLocalUnknowns) {
  const mesh::SuperposedModel model(mesh::GlobalMesh({Family::kBSpline, 3}, Box::cube(0, 2), 6),
                                    mesh::LocalMesh(1, Box::cube(0, 1), 1));
  const auto part = DofPartition::dirichlet(model, verify::exact_solution);
  EXPECT_EQ(part.free_local, 0);
  const auto sys = assemble_system(model, part, 5, verify::source_term);
  EXPECT_EQ(sys.matrix.size(), part.free_global);
  EXPECT_EQ(part.free_global, 7 * 7 * 7);
}

TEST(Partition, DimensionsAndPrescribedValues) {
  const auto model = mesh::make_study_model({Family::kBSpline, 3}, 6, 2, Case::kB);
  const auto part = DofPartition::dirichlet(model, [](const mesh::Vec3&) { return 10.0; });
  EXPECT_EQ(part.free_global, 7 * 7 * 7);
  EXPECT_EQ(part.free_local, 11 * 11 * 11);
  EXPECT_EQ(part.free_global_dofs().size() + part.constrained_global_dofs().size(), 9u * 9 * 9);
  for (int d : part.constrained_global_dofs()) EXPECT_EQ(part.global_value[d], 10.0);
  const auto sys = assemble_system(model, part, 4, {});
  EXPECT_EQ(sys.matrix.size(), part.size());
  EXPECT_EQ(sys.load.size(), static_cast<std::size_t>(part.size()));
}

TEST(Load, ConstantDataGivesConstantCoefficients) {
  for (auto g : {BasisSpec{Family::kBSpline, 2}, BasisSpec{Family::kLagrange, 2}}) {
    const auto model = mesh::make_study_model(g, 6, 1, Case::kB);
    const auto part = DofPartition::dirichlet(model, [](const mesh::Vec3&) { return 10.0; });
    auto sys = assemble_system(model, part, 3, {});
    // d = 10 on free global DOFs and 0 on local ones solves K d = F.
    std::vector<double> d(part.size(), 0.0), kd(part.size());
    std::fill(d.begin(), d.begin() + part.free_global, 10.0);
    sys.matrix.multiply(d, kd);
    double fmax = 0.0, diff = 0.0;
    for (int i = 0; i < part.size(); ++i) {
      fmax = std::max(fmax, std::abs(sys.load[i]));
      diff = std::max(diff, std::abs(kd[i] - sys.load[i]));
    }
    EXPECT_GT(fmax, 0.0);
    EXPECT_LE(diff, 1e-12 * fmax) << g.to_string();
  }
}

TEST(Coupling1DTest, AlignedMeshesMatchClosedForm) {
  // Local interval on global element boundaries: every cell integrand is a
  // polynomial, so p+q+1 points are exact.
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 3; ++q) {
      const mesh::Axis g({Family::kLagrange, p}, 0.0, 1.0, 2);
      const mesh::Axis l({Family::kLagrange, q}, 0.5, 1.0, 3);
      const auto c = coupling_1d(g, l, p + q + 1);
      const auto ex = exact_coupling(p, 2, Q(0), Q(1), q, 3, Q(1, 2), Q(1));
      EXPECT_LE(max_coupling_error(c, ex), 1e-12) << "p=" << p << " q=" << q;
    }
}

TEST(Coupling1DTest, CrossingElementIsOnlyApproximated) {
  // Two global linear elements on [0,1], one local linear element on
  // [0.25, 0.75]: the global kink at 0.5 sits inside the local element.
  const mesh::Axis g({Family::kLagrange, 1}, 0.0, 1.0, 2);
  const mesh::Axis l({Family::kLagrange, 1}, 0.25, 0.75, 1);
  const auto ex = exact_coupling(1, 2, Q(0), Q(1), 1, 1, Q(1, 4), Q(3, 4));
  EXPECT_EQ(ex.mass[0][0], Q(5, 96));
  EXPECT_EQ(ex.stiff[1][0], Q(0));
  // Even point counts avoid the kink and converge; odd ones put the centre
  // point on it and keep an O(1) stiffness error.
  double previous = 1.0;
  for (int n : {2, 4, 8, 16}) {
    const double err = max_coupling_error(coupling_1d(g, l, n), ex);
    EXPECT_LT(err, previous) << "n=" << n;
    previous = err;
  }
  EXPECT_LT(previous, 1e-3);
  EXPECT_GT(max_coupling_error(coupling_1d(g, l, 9), ex), 0.1);
}

TEST(Quadrature, BSplineCouplingInsensitiveToOrder) {
  const auto model = mesh::make_study_model({Family::kBSpline, 3}, 6, 1, Case::kA);
  const auto lo = dense(unconstrained_system(model, 4).matrix);
  const auto hi = dense(unconstrained_system(model, 7).matrix);
  double diff = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) diff = std::max(diff, std::abs(lo[i] - hi[i]));
  EXPECT_LT(diff, 1e-3 * max_abs(hi));
}

TEST(Assembler, LocalOnlyAssemblyLeavesGlobalBlockEmpty) {
  const auto model = mesh::make_study_model({Family::kLagrange, 1}, 4, 1, Case::kB);
  const auto part = DofPartition::unconstrained(model);
  SystemAssembler a(model, part);
  a.assemble_local(2, {});
  const auto sys = std::move(a).finalize();
  EXPECT_EQ(sys.matrix.size(), part.size());
  EXPECT_EQ(sys.matrix.at(0, 0), 0.0);
}
