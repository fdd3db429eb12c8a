#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"

using sfem::quadrature::gauss_rule;
using sfem::quadrature::kMaxPoints;

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre
// recurrence, weights are 2 * (first eigenvector component)^2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> golub_welsch(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

double monomial_integral(int k) { return k % 2 ? 0.0 : 2.0 / (k + 1); }

}  // namespace

TEST(GaussRule, MatchesGolubWelschEigenvalues) {
  for (int n = 1; n <= kMaxPoints; ++n) {
    const auto rule = gauss_rule(n);
    const auto [x, w] = golub_welsch(n);
    ASSERT_EQ(rule.size(), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(rule.points[i], x[i], 1e-13) << "n=" << n;
      EXPECT_NEAR(rule.weights[i], w[i], 1e-13) << "n=" << n;
    }
  }
}

TEST(GaussRule, IntegratesDegree2nMinus1Exactly) {
  for (int n = 1; n <= kMaxPoints; ++n) {
    const auto rule = gauss_rule(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::pow(rule.points[i], k);
      const double exact = monomial_integral(k);
      EXPECT_LE(std::abs(s - exact), 1e-10 * std::max(1.0, std::abs(exact))) << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussRule, NotExactForDegree2n) {
  for (int n = 1; n <= 8; ++n) {
    const auto rule = gauss_rule(n);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::pow(rule.points[i], 2 * n);
    EXPECT_GT(std::abs(s - monomial_integral(2 * n)), 1e-8) << "n=" << n;
  }
}

TEST(GaussRule, SymmetricWithWeightsSummingToTwo) {
  for (int n = 1; n <= kMaxPoints; ++n) {
    const auto rule = gauss_rule(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += rule.weights[i];
      EXPECT_EQ(rule.points[i], -rule.points[n - 1 - i]);
      EXPECT_EQ(rule.weights[i], rule.weights[n - 1 - i]);
      EXPECT_GT(rule.weights[i], 0.0);
      if (i > 0) EXPECT_LT(rule.points[i - 1], rule.points[i]);
    }
    EXPECT_NEAR(sum, 2.0, 1e-14);
  }
}

TEST(GaussRule, KnownTwoAndThreePointRules) {
  const auto r2 = gauss_rule(2);
  EXPECT_NEAR(r2.points[1], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
  const auto r3 = gauss_rule(3);
  EXPECT_EQ(r3.points[1], 0.0);
  EXPECT_NEAR(r3.points[2], std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(r3.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(GaussRule, RejectsUnsupportedCounts) {
  EXPECT_THROW(gauss_rule(0), sfem::UnsupportedOrderError);
  EXPECT_THROW(gauss_rule(kMaxPoints + 1), sfem::UnsupportedOrderError);
  EXPECT_THROW(gauss_rule(-3), sfem::UnsupportedOrderError);
}

TEST(TensorRule, IntegratesSeparableMonomials) {
  const auto rule = sfem::quadrature::tensor3(gauss_rule(2), gauss_rule(3), gauss_rule(4));
  ASSERT_EQ(rule.size(), 24u);
  // Degrees up to 3, 5, 7 per axis are exact.
  double s = 0.0;
  for (const auto& p : rule.points) s += p.weight * std::pow(p.xi[0], 2) * std::pow(p.xi[1], 4) * std::pow(p.xi[2], 6);
  EXPECT_NEAR(s, (2.0 / 3) * (2.0 / 5) * (2.0 / 7), 1e-14);
}

TEST(TensorRule, ZIndexRunsFastest) {
  const auto rule = sfem::quadrature::tensor3(2);
  const auto g = gauss_rule(2);
  EXPECT_EQ(rule.points[0].xi[2], g.points[0]);
  EXPECT_EQ(rule.points[1].xi[2], g.points[1]);
  EXPECT_EQ(rule.points[1].xi[0], g.points[0]);
  double w = 0.0;
  for (const auto& p : rule.points) w += p.weight;
  EXPECT_NEAR(w, 8.0, 1e-14);
}
