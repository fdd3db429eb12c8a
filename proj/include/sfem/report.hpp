#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sfem/verify.hpp"

namespace sfem::report {

/// Column names of the convergence CSV, in order.
inline constexpr std::array<std::string_view, 10> kConvergenceColumns = {
    "case", "global_family", "global_order", "local_order", "h_G",
    "dof",  "l2_error",      "cg_iters",     "cg_converged", "spd"};

inline constexpr std::array<std::string_view, 8> kErrorFieldColumns = {
    "i", "j", "k", "cx", "cy", "cz", "squared_error", "crossing"};

inline constexpr std::array<std::string_view, 4> kSensitivityColumns = {
    "quad_points", "l2_error", "relative_change", "cg_converged"};

inline constexpr std::array<std::string_view, 2> kResidualColumns = {"iteration",
                                                                     "relative_residual"};

/// 17 significant digits.
std::string format_double(double v);

/// "pass", "fail", or "na" when the test did not run.
std::string spd_label(const verify::PointResult& r);

void write_convergence_header(std::ostream& os);
void write_convergence_row(std::ostream& os, const verify::PointResult& r);
void write_convergence_csv(std::ostream& os, const std::vector<verify::PointResult>& rows);

void write_error_field_csv(std::ostream& os, const verify::ErrorReport& error);
void write_sensitivity_csv(std::ostream& os, const verify::SensitivityTable& table);
void write_residual_history_csv(std::ostream& os, const solver::SolveReport& report);

/// Matrix Market coordinate file, real symmetric, lower triangle, 1-based.
void write_matrix_market(std::ostream& os, const assembly::SymmetricSparseMatrix& k);

/// Bounds, elements, element sizes and DOF counts of both meshes.
nlohmann::json mesh_summary(const mesh::SuperposedModel& model);

nlohmann::json point_json(const verify::PointResult& r);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace sfem::report
