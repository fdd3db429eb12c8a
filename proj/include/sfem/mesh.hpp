#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sfem/basis.hpp"

namespace sfem::mesh {

using Vec3 = std::array<double, 3>;

/// Basis family and polynomial order of a mesh, e.g. "bspline:3".
struct BasisSpec {
  basis::Family family = basis::Family::kLagrange;
  int order = 1;

  static BasisSpec parse(const std::string& text);
  std::string to_string() const;
  std::string family_name() const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

struct Box {
  Vec3 lo{};
  Vec3 hi{};

  static Box cube(double lo, double hi) { return {{lo, lo, lo}, {hi, hi, hi}}; }
  double edge(int a) const { return hi[a] - lo[a]; }
  bool contains(const Vec3& x, double tol = 0.0) const;
};

/// One direction of a structured mesh: `elements` equal intervals over
/// [lo, hi] carrying a Lagrange or open-knot B-spline basis. For B-splines
/// the parametric coordinate equals the physical coordinate.
class Axis {
 public:
  Axis(BasisSpec spec, double lo, double hi, int elements);

  const BasisSpec& spec() const { return spec_; }
  int order() const { return spec_.order; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double h() const { return h_; }
  int elements() const { return elements_; }
  int num_functions() const { return num_functions_; }

  double element_lo(int e) const;
  double element_hi(int e) const { return element_lo(e + 1); }

  struct Location {
    int element;
    double xi;  ///< parent coordinate in [-1, 1]
  };

  /// Explicit inverse map: element = floor((x - lo)/h) clamped to the valid
  /// range, so interior ties go to the element whose lower face holds x.
  Location locate(double x) const;
  double map(int element, double xi) const;

  /// Values and physical derivatives of the functions supported on `element`.
  basis::Eval1D eval_in_element(int element, double x) const;
  basis::Eval1D eval(double x) const { return eval_in_element(locate(x).element, x); }

  /// Node position (Lagrange) or Greville abscissa (B-spline) of function i.
  double dof_coordinate(int i) const;

  /// First and last element (inclusive) of the support of function i.
  std::pair<int, int> support(int i) const;

  const basis::KnotVector* knots() const { return bspline_ ? &bspline_->knots() : nullptr; }

 private:
  BasisSpec spec_;
  double lo_;
  double hi_;
  int elements_;
  double h_;
  int num_functions_;
  std::optional<basis::LagrangeBasis1D> lagrange_;
  std::optional<basis::BSplineBasis1D> bspline_;
};

/// Basis functions of a mesh supported at one point, with flat DOF ids and
/// physical gradients.
struct PointBasis {
  int size = 0;
  std::array<int, basis::kMaxLocal3D> dofs{};
  std::array<double, basis::kMaxLocal3D> values{};
  std::array<Vec3, basis::kMaxLocal3D> grads{};
};

/// Tensor-product structured mesh of cubes over a box. DOFs are numbered
/// lexicographically with the z index running fastest.
class StructuredMesh {
 public:
  StructuredMesh(BasisSpec spec, Box box, int elements);

  const BasisSpec& spec() const { return spec_; }
  const Box& box() const { return box_; }
  int elements_per_axis() const { return elements_; }
  double h() const { return axes_[0].h(); }
  const Axis& axis(int a) const { return axes_[a]; }

  int functions_per_axis() const { return axes_[0].num_functions(); }
  int num_dofs() const;
  int num_elements() const { return elements_ * elements_ * elements_; }

  int dof_index(int i, int j, int k) const;
  std::array<int, 3> dof_triple(int dof) const;
  Vec3 dof_coordinate(int dof) const;

  int element_index(int i, int j, int k) const;
  std::array<int, 3> element_triple(int e) const;
  Box element_box(const std::array<int, 3>& e) const;

  struct PointLocation {
    std::array<int, 3> element;
    Vec3 xi;
  };

  /// Throws DomainError when x is outside the box by more than 1e-12 h.
  PointLocation locate(const Vec3& x) const;
  Vec3 map(const std::array<int, 3>& element, const Vec3& xi) const;

  PointBasis basis_at(const Vec3& x) const;
  PointBasis basis_in_element(const std::array<int, 3>& element, const Vec3& x) const;

  /// True when any index of the DOF triple is on a box face, i.e. the
  /// function is nonzero somewhere on the box boundary.
  bool on_boundary(int dof) const;

 private:
  BasisSpec spec_;
  Box box_;
  int elements_;
  std::array<Axis, 3> axes_;
};

/// Coarse mesh over the whole domain.
class GlobalMesh : public StructuredMesh {
 public:
  GlobalMesh(BasisSpec spec, Box box, int elements);
};

/// Fine Lagrange mesh over the local box; every node on a face of the box
/// belongs to the local boundary.
class LocalMesh : public StructuredMesh {
 public:
  LocalMesh(int order, Box box, int elements);

  const std::vector<bool>& boundary_markers() const { return boundary_; }
  bool is_boundary(int dof) const { return boundary_[dof]; }
  int boundary_count() const;

 private:
  std::vector<bool> boundary_;
};

GlobalMesh build_global(BasisSpec spec, Box box, int elements);
LocalMesh build_local(int order, Box box, int elements);

enum class Case { kA, kB, kCustom };

std::string to_string(Case c);
Case parse_case(const std::string& text);

/// Global mesh plus a local mesh embedded in it. The local box must lie in
/// the global box with faces on global element boundaries.
class SuperposedModel {
 public:
  SuperposedModel(GlobalMesh global, LocalMesh local, Case tag = Case::kCustom);

  const GlobalMesh& global() const { return global_; }
  const LocalMesh& local() const { return local_; }
  Case case_tag() const { return tag_; }

  /// Whether global element e (flat index) lies inside the local box.
  bool global_element_inside(int e) const { return inside_[e]; }
  int global_elements_inside() const;

  /// Whether local element e (flat index) has a global element boundary
  /// strictly inside it along any axis.
  bool local_element_crosses(int e) const { return crossing_[e]; }

 private:
  GlobalMesh global_;
  LocalMesh local_;
  Case tag_;
  std::vector<bool> inside_;
  std::vector<bool> crossing_;
};

/// Global elements per axis spanned by the local box in the study setup:
/// the largest m <= elements/2 compatible with the case ratio (Case A needs
/// m divisible by 3 so that 4m/3 local elements fit).
int local_box_elements(int global_elements, Case c);

/// Local elements per axis for a local box of m global elements.
int local_elements_for(int box_elements, Case c);

/// Study model over [lo, hi]^3 with the local box at the lower corner.
SuperposedModel make_study_model(BasisSpec global, int global_elements, int local_order,
                                 Case c, double lo = 0.0, double hi = 2.0);

}  // namespace sfem::mesh
