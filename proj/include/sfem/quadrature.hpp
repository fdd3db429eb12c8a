#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace sfem::quadrature {

inline constexpr int kMaxPoints = 16;

/// n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of
/// degree 2n-1.
struct GaussRule1D {
  int order = 0;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

struct QuadPoint3D {
  std::array<double, 3> xi;
  double weight;
};

/// Tensor product of three 1D rules. Points are flattened with the z index
/// running fastest.
struct GaussRule3D {
  std::array<GaussRule1D, 3> axes;
  std::vector<QuadPoint3D> points;

  std::size_t size() const { return points.size(); }
};

/// Throws UnsupportedOrderError unless 1 <= n <= kMaxPoints.
GaussRule1D gauss_rule(int n);

GaussRule3D tensor3(const GaussRule1D& rule_x, const GaussRule1D& rule_y,
                    const GaussRule1D& rule_z);

/// Isotropic n x n x n rule.
GaussRule3D tensor3(int n);

}  // namespace sfem::quadrature
