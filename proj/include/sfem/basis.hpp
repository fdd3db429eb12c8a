#pragma once

#include <array>
#include <span>
#include <variant>
#include <vector>

namespace sfem::basis {

inline constexpr int kMaxOrder = 3;
inline constexpr int kMaxLocal1D = kMaxOrder + 1;
inline constexpr int kMaxLocal3D = kMaxLocal1D * kMaxLocal1D * kMaxLocal1D;

enum class Family { kLagrange, kBSpline };

/// Nonzero window of a 1D basis at one point: functions
/// first .. first+count-1 with their values and first derivatives.
struct Eval1D {
  int first = 0;
  int count = 0;
  std::array<double, kMaxLocal1D> values{};
  std::array<double, kMaxLocal1D> derivs{};
};

/// Lagrange polynomials of order p on the parent element [-1, 1] with
/// equally spaced nodes, node 0 at -1 and node p at +1.
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(int order);

  int order() const { return order_; }
  int size() const { return order_ + 1; }
  double node(int i) const { return nodes_[i]; }

  /// Throws DomainError when xi is outside [-1, 1].
  Eval1D eval(double xi) const;

 private:
  int order_;
  std::array<double, kMaxLocal1D> nodes_{};
};

/// Open knot vector with simple, uniformly spaced interior knots.
class KnotVector {
 public:
  KnotVector(int order, std::vector<double> knots);

  static KnotVector open_uniform(int order, double lo, double hi, int spans);

  int order() const { return order_; }
  int num_functions() const { return static_cast<int>(knots_.size()) - order_ - 1; }
  int num_spans() const { return num_functions() - order_; }
  std::span<const double> knots() const { return knots_; }
  double knot(int i) const { return knots_[i]; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Knot index i with knot(i) <= xi < knot(i+1); the last nonempty span is
  /// closed on the right. Throws DomainError outside [front, back].
  int find_span(double xi) const;

  /// Averaged knot location of function i.
  double greville(int i) const;

 private:
  int order_;
  std::vector<double> knots_;
};

/// B-spline basis over a knot vector. Evaluation computes only the p+1
/// functions that can be nonzero in the span containing the point.
class BSplineBasis1D {
 public:
  explicit BSplineBasis1D(KnotVector knots);

  const KnotVector& knots() const { return knots_; }
  int order() const { return knots_.order(); }
  int num_functions() const { return knots_.num_functions(); }

  Eval1D eval(double xi) const;

  /// Evaluates the polynomial pieces of span `span` (a knot index) at xi
  /// without locating the span.
  Eval1D eval_in_span(int span, double xi) const;

 private:
  KnotVector knots_;
};

using Basis1D = std::variant<LagrangeBasis1D, BSplineBasis1D>;

Eval1D evaluate(const Basis1D& basis, double xi);

/// Tensor-product values and gradients. Local function l corresponds to
/// (a, b, c) with l = (a * count[1] + b) * count[2] + c.
struct Eval3D {
  std::array<int, 3> first{};
  std::array<int, 3> count{};
  int size = 0;
  std::array<double, kMaxLocal3D> values{};
  std::array<std::array<double, 3>, kMaxLocal3D> grads{};
};

Eval3D tensor_product(const Eval1D& ex, const Eval1D& ey, const Eval1D& ez);

class Basis3D {
 public:
  Basis3D(Basis1D bx, Basis1D by, Basis1D bz) : axes_{std::move(bx), std::move(by), std::move(bz)} {}

  const Basis1D& axis(int a) const { return axes_[a]; }

  /// Values and gradients in parametric coordinates.
  Eval3D eval(const std::array<double, 3>& point) const;

 private:
  std::array<Basis1D, 3> axes_;
};

}  // namespace sfem::basis
