#include "sfem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sfem/error.hpp"

namespace sfem::quadrature {
namespace {

constexpr double kNewtonTolerance = 1e-15;
constexpr int kNewtonMaxIterations = 100;

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double pn = n == 0 ? 1.0 : p1;
  const double pn_1 = n == 0 ? 0.0 : p0;
  const double dpn = n * (x * pn - pn_1) / (x * x - 1.0);
  return {pn, dpn};
}

}  // namespace

GaussRule1D gauss_rule(int n) {
  if (n < 1 || n > kMaxPoints) {
    throw UnsupportedOrderError("gauss_rule: " + std::to_string(n) +
                                " points requested, supported range is 1.." +
                                std::to_string(kMaxPoints));
  }
  GaussRule1D rule;
  rule.order = n;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  // Roots are computed for the positive half and mirrored, so the point set
  // is exactly symmetric.
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < kNewtonMaxIterations; ++it) {
      const auto [p, d] = legendre(n, x);
      dp = d;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) <= kNewtonTolerance) break;
    }
    dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = x;
    rule.points[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) {
    // P_n'(0) via the recurrence is well defined; x = 0 is the middle root.
    const double dp = legendre(n, 0.0).second;
    rule.points[half] = 0.0;
    rule.weights[half] = 2.0 / (dp * dp);
  }
  return rule;
}

GaussRule3D tensor3(const GaussRule1D& rule_x, const GaussRule1D& rule_y,
                    const GaussRule1D& rule_z) {
  GaussRule3D rule;
  rule.axes = {rule_x, rule_y, rule_z};
  rule.points.reserve(rule_x.size() * rule_y.size() * rule_z.size());
  for (std::size_t i = 0; i < rule_x.size(); ++i) {
    for (std::size_t j = 0; j < rule_y.size(); ++j) {
      for (std::size_t k = 0; k < rule_z.size(); ++k) {
        rule.points.push_back(
            {{rule_x.points[i], rule_y.points[j], rule_z.points[k]},
             rule_x.weights[i] * rule_y.weights[j] * rule_z.weights[k]});
      }
    }
  }
  return rule;
}

GaussRule3D tensor3(int n) {
  const auto r = gauss_rule(n);
  return tensor3(r, r, r);
}

}  // namespace sfem::quadrature
