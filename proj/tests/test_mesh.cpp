#include <cmath>

#include <gtest/gtest.h>

#include "sfem/error.hpp"
#include "sfem/mesh.hpp"

using namespace sfem::mesh;
using sfem::basis::Family;

TEST(BasisSpecTest, ParsesAndPrints) {
  const auto b = BasisSpec::parse("bspline:3");
  EXPECT_EQ(b.family, Family::kBSpline);
  EXPECT_EQ(b.order, 3);
  EXPECT_EQ(b.to_string(), "bspline:3");
  EXPECT_EQ(BasisSpec::parse("lagrange:2").family_name(), "lagrange");
  EXPECT_THROW(BasisSpec::parse("nurbs:2"), sfem::ConfigError);
  EXPECT_THROW(BasisSpec::parse("bspline"), sfem::ConfigError);
  EXPECT_THROW(BasisSpec::parse("lagrange:x"), sfem::ConfigError);
}

TEST(AxisTest, LocateExample) {
  const Axis a({Family::kLagrange, 1}, 0.0, 2.0, 12);
  const auto loc = a.locate(0.7);
  EXPECT_EQ(loc.element, 4);
  EXPECT_NEAR(loc.xi, -0.6, 1e-13);
  EXPECT_NEAR(a.map(loc.element, loc.xi), 0.7, 1e-13);
}

TEST(AxisTest, LocateClampsEndsAndRejectsOutside) {
  const Axis a({Family::kLagrange, 2}, 0.0, 2.0, 4);
  EXPECT_EQ(a.locate(2.0).element, 3);
  EXPECT_NEAR(a.locate(2.0).xi, 1.0, 1e-15);
  EXPECT_EQ(a.locate(0.0).element, 0);
  EXPECT_EQ(a.locate(0.5).element, 1);  // floor puts interior nodes in the upper element
  EXPECT_THROW(a.locate(2.01), sfem::DomainError);
  EXPECT_THROW(a.locate(-0.01), sfem::DomainError);
}

TEST(AxisTest, RoundTripIsExact) {
  const Axis a({Family::kBSpline, 3}, 0.0, 2.0, 9);
  for (int k = 0; k <= 100; ++k) {
    const double x = 0.02 * k;
    const auto loc = a.locate(x);
    EXPECT_NEAR(a.map(loc.element, loc.xi), x, 1e-13);
  }
}

TEST(StructuredMeshTest, LagrangeLinearTwelveElements) {
  const GlobalMesh m({Family::kLagrange, 1}, Box::cube(0.0, 2.0), 12);
  EXPECT_EQ(m.functions_per_axis(), 13);
  EXPECT_EQ(m.num_dofs(), 13 * 13 * 13);
  EXPECT_NEAR(m.h(), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(m.axis(0).dof_coordinate(1) - m.axis(0).dof_coordinate(0), 1.0 / 6.0, 1e-15);
}

TEST(StructuredMeshTest, CubicBSplineCountsAndCoarsestSize) {
  const GlobalMesh m({Family::kBSpline, 3}, Box::cube(0.0, 2.0), 12);
  EXPECT_EQ(m.functions_per_axis(), 15);
  EXPECT_EQ(m.num_dofs(), 3375);
  EXPECT_NEAR(m.h(), 0.166667, 1e-6);
}

TEST(StructuredMeshTest, LocalMeshesOfBothCases) {
  const LocalMesh a(1, Box::cube(0.0, 1.0), 8);
  EXPECT_EQ(a.num_dofs(), 729);
  EXPECT_NEAR(a.h(), 0.125, 1e-15);
  const LocalMesh b(1, Box::cube(0.0, 1.0), 12);
  EXPECT_NEAR(b.h(), 1.0 / 12.0, 1e-15);
  // Boundary markers: all nodes except the (n-1)^3 interior ones.
  EXPECT_EQ(a.boundary_count(), 729 - 7 * 7 * 7);
  const LocalMesh q3(3, Box::cube(0.0, 1.0), 2);
  EXPECT_EQ(q3.boundary_count(), 7 * 7 * 7 - 5 * 5 * 5);
}

TEST(StructuredMeshTest, DofNumberingRunsZFastest) {
  const GlobalMesh m({Family::kLagrange, 2}, Box::cube(0.0, 1.0), 2);
  EXPECT_EQ(m.dof_index(0, 0, 1), 1);
  EXPECT_EQ(m.dof_index(0, 1, 0), 5);
  EXPECT_EQ(m.dof_index(1, 0, 0), 25);
  const auto t = m.dof_triple(m.dof_index(3, 1, 4));
  EXPECT_EQ(t, (std::array<int, 3>{3, 1, 4}));
  const auto x = m.dof_coordinate(m.dof_index(1, 2, 4));
  EXPECT_NEAR(x[0], 0.25, 1e-15);
  EXPECT_NEAR(x[1], 0.5, 1e-15);
  EXPECT_NEAR(x[2], 1.0, 1e-15);
}

TEST(StructuredMeshTest, BasisAtReproducesCoordinates) {
  // Linear fields are reproduced by both families (nodes / Greville points).
  for (auto spec : {BasisSpec{Family::kLagrange, 3}, BasisSpec{Family::kBSpline, 2}}) {
    const GlobalMesh m(spec, Box::cube(0.0, 2.0), 5);
    const Vec3 x{0.37, 1.91, 1.2};
    const auto b = m.basis_at(x);
    Vec3 r{0, 0, 0};
    for (int i = 0; i < b.size; ++i) {
      const auto c = m.dof_coordinate(b.dofs[i]);
      for (int a = 0; a < 3; ++a) r[a] += b.values[i] * c[a];
    }
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(r[a], x[a], 1e-13) << spec.to_string();
  }
}

TEST(StructuredMeshTest, RejectsNonCubeAndTooFewSpans) {
  EXPECT_THROW(GlobalMesh({Family::kLagrange, 1}, Box{{0, 0, 0}, {1, 2, 1}}, 4), sfem::GeometryError);
  EXPECT_THROW(GlobalMesh({Family::kBSpline, 3}, Box::cube(0, 1), 2), sfem::GeometryError);
}

TEST(SuperposedModelTest, ClassifiesInsideElements) {
  for (int ne : {6, 12}) {
    const auto model = make_study_model({Family::kBSpline, 3}, ne, 1, Case::kA);
    EXPECT_EQ(model.global_elements_inside(), (ne / 2) * (ne / 2) * (ne / 2));
    EXPECT_NEAR(model.local().box().hi[0], 1.0, 1e-15);
    EXPECT_NEAR(model.global().h() / model.local().h(), 4.0 / 3.0, 1e-13);
  }
  const auto b = make_study_model({Family::kLagrange, 1}, 12, 1, Case::kB);
  EXPECT_EQ(b.local().elements_per_axis(), 12);
  EXPECT_NEAR(b.global().h() / b.local().h(), 2.0, 1e-13);
}

TEST(SuperposedModelTest, CrossingFlagsFollowTheCase) {
  const auto b = make_study_model({Family::kLagrange, 1}, 6, 1, Case::kB);
  for (int e = 0; e < b.local().num_elements(); ++e) EXPECT_FALSE(b.local_element_crosses(e));
  const auto a = make_study_model({Family::kLagrange, 1}, 6, 1, Case::kA);
  // Local h = 1/4 against global lines at 1/3, 2/3: local elements 1 and 2 cross per axis.
  int crossing = 0;
  for (int e = 0; e < a.local().num_elements(); ++e) crossing += a.local_element_crosses(e);
  EXPECT_EQ(crossing, 64 - 8);
}

TEST(SuperposedModelTest, RejectsMisalignedOrOutsideBoxes) {
  GlobalMesh g({Family::kLagrange, 1}, Box::cube(0.0, 2.0), 6);
  EXPECT_THROW(SuperposedModel(g, LocalMesh(1, Box::cube(0.0, 0.5), 2)), sfem::GeometryError);
  EXPECT_THROW(SuperposedModel(g, LocalMesh(1, Box::cube(1.0, 2.5), 2)), sfem::GeometryError);
  EXPECT_THROW(SuperposedModel(g, LocalMesh(1, Box::cube(0.0, 1.0), 5), Case::kA),
               sfem::GeometryError);
  EXPECT_NO_THROW(SuperposedModel(g, LocalMesh(1, Box::cube(1.0, 2.0), 4), Case::kA));
}

TEST(StudySetup, LocalBoxElements) {
  EXPECT_EQ(local_box_elements(6, Case::kA), 3);
  EXPECT_EQ(local_box_elements(12, Case::kA), 6);
  EXPECT_EQ(local_box_elements(9, Case::kA), 3);
  EXPECT_EQ(local_box_elements(9, Case::kB), 4);
  EXPECT_EQ(local_box_elements(15, Case::kA), 6);
  EXPECT_EQ(local_elements_for(6, Case::kA), 8);
  EXPECT_EQ(local_elements_for(6, Case::kB), 12);
  EXPECT_EQ(parse_case("A"), Case::kA);
  EXPECT_THROW(parse_case("C"), sfem::ConfigError);
}
