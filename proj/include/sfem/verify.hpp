#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sfem/assembly.hpp"
#include "sfem/mesh.hpp"
#include "sfem/solver.hpp"

namespace sfem::verify {

using assembly::ScalarField;
using mesh::Vec3;

/// u = sin(2 pi x) sin(2 pi y) sin(2 pi z) + 10
double exact_solution(const Vec3& x);
/// f = -Laplace(u) = 12 pi^2 sin(2 pi x) sin(2 pi y) sin(2 pi z)
double source_term(const Vec3& x);

/// Exact solution, source, and Dirichlet data of a verification problem.
struct ManufacturedCase {
  std::string name;
  ScalarField exact;
  ScalarField source;  ///< empty means f = 0
  ScalarField dirichlet;

  static ManufacturedCase sine();
  /// u = c, f = 0: the patch test.
  static ManufacturedCase constant(double c);
};

/// Composed solution: full coefficient vectors of both meshes, including
/// prescribed values.
struct Solution {
  std::vector<double> global;
  std::vector<double> local;

  static Solution expand(const mesh::SuperposedModel& model,
                         const assembly::DofPartition& partition, std::span<const double> d);

  double global_value(const mesh::SuperposedModel& model, const Vec3& x) const;
  /// Zero outside the local box.
  double local_value(const mesh::SuperposedModel& model, const Vec3& x) const;
  double value(const mesh::SuperposedModel& model, const Vec3& x) const {
    return global_value(model, x) + local_value(model, x);
  }
  /// Local field inside local element `element` (no point location).
  double local_value_in(const mesh::SuperposedModel& model, const std::array<int, 3>& element,
                        const Vec3& x) const;
};

struct ElementError {
  std::array<int, 3> index;
  Vec3 centroid;
  double squared_error;
  bool crossing;
};

struct ErrorReport {
  double relative_l2 = 0.0;
  double outside_squared = 0.0;  ///< integral of (u^G - u)^2 outside the local box
  double inside_squared = 0.0;   ///< integral of (u^G + u^L - u)^2 over local elements
  double denominator = 0.0;      ///< ||u|| over the global domain
  std::vector<ElementError> local_elements;

  double numerator_squared() const { return outside_squared + inside_squared; }
};

/// Default Gauss points for error integrals: max basis order + 2.
int error_quadrature_points(const mesh::SuperposedModel& model);

/// Relative L2 error. Outside the local box the global mesh carries the
/// integral, inside it the local mesh does, with the global field located
/// at each point. quad_points <= 0 selects error_quadrature_points.
ErrorReport l2_error(const mesh::SuperposedModel& model, const Solution& solution,
                     const ScalarField& exact, int quad_points = 0);

/// Assembly Gauss points for a case: Case A uses p+8, Case B p+1, with p
/// the larger of the two basis orders.
int quadrature_policy(mesh::Case c, int global_order, int local_order);

enum class Method { kProposed, kConventional };

std::string to_string(Method m);
Method method_of(const mesh::BasisSpec& global);

/// One point of a study: mesh, assembly, solve, error, optional SPD test.
struct PointConfig {
  mesh::BasisSpec global{basis::Family::kBSpline, 3};
  int local_order = 1;
  mesh::Case study_case = mesh::Case::kA;
  int elements = 6;
  std::optional<int> quad_points;  ///< overrides the case policy
  bool spd_check = false;
  solver::CgSettings cg{};
  solver::CholeskySettings cholesky{};
};

struct PointResult {
  PointConfig config;
  int quad_points = 0;
  double h_global = 0.0;
  double h_local = 0.0;
  int dof = 0;
  std::size_t nnz = 0;
  ErrorReport error;
  solver::SolveReport cg;
  std::optional<solver::SpdVerdict> spd;
  std::string spd_error;  ///< set when the SPD test could not run
  std::string failure;    ///< set by convergence_study when the pipeline threw
  double assembly_seconds = 0.0;
  double spd_seconds = 0.0;
};

PointResult run_point(const PointConfig& config,
                      const ManufacturedCase& problem = ManufacturedCase::sine());

/// Same pipeline on an explicit model; config supplies the solver settings
/// and the SPD toggle, quad_points the assembly rule.
PointResult run_model(const mesh::SuperposedModel& model, int quad_points,
                      const PointConfig& config, const ManufacturedCase& problem);

/// Least-squares slope of log(error) against log(h).
std::optional<double> fit_loglog_slope(const std::vector<double>& h,
                                       const std::vector<double>& error);

struct ConvergenceSeries {
  std::vector<PointResult> points;
  /// Fitted over converged points only; empty with fewer than two.
  std::optional<double> slope;
};

/// `elements` must be strictly increasing (h strictly decreasing).
ConvergenceSeries convergence_study(const PointConfig& base, const std::vector<int>& elements);

struct SensitivityRow {
  int quad_points = 0;
  double l2_error = 0.0;
  /// |e(n) - e(n-1)| / e(n); empty for the first row.
  std::optional<double> relative_change;
  bool converged = false;
};

struct SensitivityTable {
  int base_order = 0;  ///< p = max(global, local order)
  std::vector<SensitivityRow> rows;
  /// Smallest n from which every later consecutive change stays below the
  /// threshold.
  std::optional<int> stabilization_points;
};

inline constexpr double kStabilizationThreshold = 0.05;

/// Error for Gauss orders p+first_offset .. p+last_offset on one mesh.
SensitivityTable quadrature_sensitivity(const PointConfig& base, int first_offset = 1,
                                        int last_offset = 10);

struct DistributionResult {
  PointResult point;
  double max_crossing = 0.0;
  double max_non_crossing = 0.0;
  int crossing_count = 0;

  double ratio() const { return max_non_crossing > 0.0 ? max_crossing / max_non_crossing : 0.0; }
};

/// Per-element error in the local box when h_G : h_L = ratio_num : ratio_den,
/// with p+1 Gauss points and no other integration treatment.
DistributionResult error_distribution_experiment(const mesh::BasisSpec& global, int elements,
                                                 int ratio_num, int ratio_den,
                                                 int local_order = 1);

/// Model for an arbitrary h_G : h_L ratio with the local box at the lower
/// corner of [0, 2]^3. The box spans the largest m <= elements/2 global
/// elements for which m * ratio_num / ratio_den is an integer.
mesh::SuperposedModel make_ratio_model(const mesh::BasisSpec& global, int elements,
                                       int local_order, int ratio_num, int ratio_den);

}  // namespace sfem::verify
