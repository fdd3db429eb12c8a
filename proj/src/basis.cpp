#include "sfem/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfem/error.hpp"

namespace sfem::basis {
namespace {

void check_order(int order, const char* who) {
  if (order < 1 || order > kMaxOrder) {
    throw UnsupportedOrderError(std::string(who) + ": order " + std::to_string(order) +
                                " outside 1.." + std::to_string(kMaxOrder));
  }
}

}  // namespace

LagrangeBasis1D::LagrangeBasis1D(int order) : order_(order) {
  check_order(order, "LagrangeBasis1D");
  for (int i = 0; i <= order_; ++i) {
    nodes_[i] = -1.0 + 2.0 * i / order_;
  }
}

Eval1D LagrangeBasis1D::eval(double xi) const {
  if (!(xi >= -1.0 && xi <= 1.0)) {
    throw DomainError("lagrange_eval: parent coordinate " + std::to_string(xi) +
                      " outside [-1, 1]");
  }
  Eval1D out;
  out.first = 0;
  out.count = order_ + 1;
  for (int i = 0; i <= order_; ++i) {
    double value = 1.0;
    double deriv = 0.0;
    for (int j = 0; j <= order_; ++j) {
      if (j == i) continue;
      const double denom = nodes_[i] - nodes_[j];
      // Product rule: d/dx prod_j (x - x_j)/d_j.
      deriv = deriv * (xi - nodes_[j]) / denom + value / denom;
      value *= (xi - nodes_[j]) / denom;
    }
    out.values[i] = value;
    out.derivs[i] = deriv;
  }
  return out;
}

KnotVector::KnotVector(int order, std::vector<double> knots)
    : order_(order), knots_(std::move(knots)) {
  check_order(order, "KnotVector");
  const int m = static_cast<int>(knots_.size());
  if (m < 2 * (order_ + 1)) {
    throw GeometryError("KnotVector: too few knots for order " + std::to_string(order_));
  }
  if (!std::is_sorted(knots_.begin(), knots_.end())) {
    throw GeometryError("KnotVector: knots must be non-decreasing");
  }
  const double lo = knots_.front();
  const double hi = knots_.back();
  if (!(hi > lo)) throw GeometryError("KnotVector: empty parametric range");
  for (int i = 0; i <= order_; ++i) {
    if (knots_[i] != lo || knots_[m - 1 - i] != hi) {
      throw GeometryError("KnotVector: end knots must repeat exactly p+1 times");
    }
  }
  // Interior knots: simple and uniform, so every span has the same width.
  const int spans = num_spans();
  const double width = (hi - lo) / spans;
  for (int s = 0; s < spans; ++s) {
    const double a = knots_[order_ + s];
    const double b = knots_[order_ + s + 1];
    if (!(b > a) || std::abs((b - a) - width) > 1e-12 * (hi - lo)) {
      throw GeometryError("KnotVector: interior knots must be simple and uniformly spaced");
    }
  }
}

KnotVector KnotVector::open_uniform(int order, double lo, double hi, int spans) {
  if (spans < 1) throw GeometryError("KnotVector::open_uniform: need at least one span");
  if (!(hi > lo)) throw GeometryError("KnotVector::open_uniform: hi must exceed lo");
  std::vector<double> k;
  k.reserve(spans + 2 * order + 1);
  for (int i = 0; i < order; ++i) k.push_back(lo);
  for (int s = 0; s <= spans; ++s) {
    k.push_back(s == spans ? hi : lo + (hi - lo) * s / spans);
  }
  for (int i = 0; i < order; ++i) k.push_back(hi);
  return KnotVector(order, std::move(k));
}

int KnotVector::find_span(double xi) const {
  if (!(xi >= front() && xi <= back())) {
    throw DomainError("bspline_eval: parametric coordinate " + std::to_string(xi) +
                      " outside knot range");
  }
  const int n = num_functions();
  if (xi >= knots_[n]) return n - 1;
  const auto it = std::upper_bound(knots_.begin() + order_, knots_.begin() + n + 1, xi);
  return static_cast<int>(it - knots_.begin()) - 1;
}

double KnotVector::greville(int i) const {
  double sum = 0.0;
  for (int j = 1; j <= order_; ++j) sum += knots_[i + j];
  return sum / order_;
}

BSplineBasis1D::BSplineBasis1D(KnotVector knots) : knots_(std::move(knots)) {}

Eval1D BSplineBasis1D::eval(double xi) const {
  return eval_in_span(knots_.find_span(xi), xi);
}

Eval1D BSplineBasis1D::eval_in_span(int span, double xi) const {
  const int p = order();
  const auto& u = knots_.knots();

  // Triangular table: upper part holds basis values of increasing degree,
  // lower part the knot differences.
  std::array<std::array<double, kMaxLocal1D>, kMaxLocal1D> ndu{};
  std::array<double, kMaxLocal1D> left{};
  std::array<double, kMaxLocal1D> right{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - u[span + 1 - j];
    right[j] = u[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[j][r] == 0.0 ? 0.0 : ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  Eval1D out;
  out.first = span - p;
  out.count = p + 1;
  for (int r = 0; r <= p; ++r) {
    out.values[r] = ndu[r][p];
    const int i = span - p + r;
    double deriv = 0.0;
    if (r >= 1) {
      const double d = u[i + p] - u[i];
      if (d != 0.0) deriv += ndu[r - 1][p - 1] / d;
    }
    if (r <= p - 1) {
      const double d = u[i + p + 1] - u[i + 1];
      if (d != 0.0) deriv -= ndu[r][p - 1] / d;
    }
    out.derivs[r] = p * deriv;
  }
  return out;
}

Eval1D evaluate(const Basis1D& basis, double xi) {
  return std::visit([xi](const auto& b) { return b.eval(xi); }, basis);
}

Eval3D tensor_product(const Eval1D& ex, const Eval1D& ey, const Eval1D& ez) {
  Eval3D out;
  out.first = {ex.first, ey.first, ez.first};
  out.count = {ex.count, ey.count, ez.count};
  out.size = ex.count * ey.count * ez.count;
  int l = 0;
  for (int a = 0; a < ex.count; ++a) {
    for (int b = 0; b < ey.count; ++b) {
      const double vxy = ex.values[a] * ey.values[b];
      const double dxy = ex.derivs[a] * ey.values[b];
      const double xdy = ex.values[a] * ey.derivs[b];
      for (int c = 0; c < ez.count; ++c, ++l) {
        out.values[l] = vxy * ez.values[c];
        out.grads[l] = {dxy * ez.values[c], xdy * ez.values[c], vxy * ez.derivs[c]};
      }
    }
  }
  return out;
}

Eval3D Basis3D::eval(const std::array<double, 3>& point) const {
  return tensor_product(evaluate(axes_[0], point[0]), evaluate(axes_[1], point[1]),
                        evaluate(axes_[2], point[2]));
}

}  // namespace sfem::basis
