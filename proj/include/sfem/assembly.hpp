#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "sfem/mesh.hpp"
#include "sfem/sparse.hpp"

namespace sfem::assembly {

using mesh::Vec3;
using ScalarField = std::function<double(const Vec3&)>;

/// Split of global and local mesh DOFs into free unknowns and constrained
/// values. System rows hold the free global DOFs first (in mesh order),
/// then the free local DOFs.
struct DofPartition {
  static constexpr int kConstrained = -1;

  std::vector<int> global_row;       ///< system row or kConstrained
  std::vector<int> local_row;        ///< system row or kConstrained
  std::vector<double> global_value;  ///< prescribed value where constrained, else 0
  int free_global = 0;
  int free_local = 0;

  int size() const { return free_global + free_local; }

  /// Global DOFs whose functions are nonzero on the domain boundary take g
  /// sampled at their node (Lagrange) or Greville point (B-spline); local
  /// DOFs on the local box boundary are fixed to zero.
  static DofPartition dirichlet(const mesh::SuperposedModel& model, const ScalarField& g);

  /// Every DOF free. Gives the unreduced block matrix.
  static DofPartition unconstrained(const mesh::SuperposedModel& model);

  std::vector<int> free_global_dofs() const;
  std::vector<int> constrained_global_dofs() const;
};

struct LinearSystem {
  SymmetricSparseMatrix matrix;
  std::vector<double> load;
};

/// Accumulates K = [[K^GG, K^GL], [K^LG, K^LL]] and F over the free DOFs of
/// a partition. Contributions in constrained columns move to the load
/// vector, multiplied by the prescribed values.
///
/// Element integrals use tensor Gauss rules evaluated in sum-factorized
/// form: on an axis-aligned cell each stiffness entry is a sum of products
/// of 1D mass and derivative integrals over the same 1D point sets.
class SystemAssembler {
 public:
  SystemAssembler(const mesh::SuperposedModel& model, const DofPartition& partition);
  ~SystemAssembler();
  SystemAssembler(SystemAssembler&&) noexcept;
  SystemAssembler& operator=(SystemAssembler&&) noexcept;

  /// K^GG and the global part of F over every global element.
  void assemble_global(int quad_points, const ScalarField& source);

  /// K^LL and the local source term over every local element.
  void assemble_local(int quad_points, const ScalarField& source);

  /// K^GL and K^LG (stored as its exact transpose), integrated element by
  /// element on the local mesh with the global basis located at each point.
  void assemble_coupling(int quad_points);

  LinearSystem finalize() &&;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Dense 1D coupling integrals over the local axis: entry (i, j) pairs
/// global function i with local function j, each local element integrated
/// with one Gauss rule and the global basis located at every point.
struct Coupling1D {
  int global_functions = 0;
  int local_functions = 0;
  std::vector<double> mass;   ///< integral of N_i^G N_j^L, row-major
  std::vector<double> stiff;  ///< integral of dN_i^G/dx dN_j^L/dx, row-major

  double mass_at(int i, int j) const { return mass[i * local_functions + j]; }
  double stiff_at(int i, int j) const { return stiff[i * local_functions + j]; }
};

Coupling1D coupling_1d(const mesh::Axis& global, const mesh::Axis& local, int quad_points);

/// All three blocks with one Gauss order.
LinearSystem assemble_system(const mesh::SuperposedModel& model, const DofPartition& partition,
                             int quad_points, const ScalarField& source);

}  // namespace sfem::assembly
