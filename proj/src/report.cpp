#include "sfem/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "sfem/error.hpp"

namespace sfem::report {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string spd_label(const verify::PointResult& r) {
  if (!r.spd) return "na";
  return r.spd->positive_definite() ? "pass" : "fail";
}

namespace {

template <std::size_t N>
void write_header(std::ostream& os, const std::array<std::string_view, N>& cols) {
  for (std::size_t i = 0; i < N; ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

}  // namespace

void write_convergence_header(std::ostream& os) { write_header(os, kConvergenceColumns); }

void write_convergence_row(std::ostream& os, const verify::PointResult& r) {
  const auto& c = r.config;
  os << mesh::to_string(c.study_case) << ',' << c.global.family_name() << ',' << c.global.order
     << ',' << c.local_order << ',' << format_double(r.h_global) << ',' << r.dof << ','
     << format_double(r.error.relative_l2) << ',' << r.cg.iterations << ','
     << (r.cg.converged ? "true" : "false") << ',' << spd_label(r) << '\n';
}

void write_convergence_csv(std::ostream& os, const std::vector<verify::PointResult>& rows) {
  write_convergence_header(os);
  for (const auto& r : rows) write_convergence_row(os, r);
}

void write_error_field_csv(std::ostream& os, const verify::ErrorReport& error) {
  write_header(os, kErrorFieldColumns);
  for (const auto& e : error.local_elements) {
    os << e.index[0] << ',' << e.index[1] << ',' << e.index[2] << ','
       << format_double(e.centroid[0]) << ',' << format_double(e.centroid[1]) << ','
       << format_double(e.centroid[2]) << ',' << format_double(e.squared_error) << ','
       << (e.crossing ? 1 : 0) << '\n';
  }
}

void write_sensitivity_csv(std::ostream& os, const verify::SensitivityTable& table) {
  write_header(os, kSensitivityColumns);
  for (const auto& row : table.rows) {
    os << row.quad_points << ',' << format_double(row.l2_error) << ','
       << (row.relative_change ? format_double(*row.relative_change) : "") << ','
       << (row.converged ? "true" : "false") << '\n';
  }
}

void write_residual_history_csv(std::ostream& os, const solver::SolveReport& report) {
  write_header(os, kResidualColumns);
  for (const auto& s : report.history) {
    os << s.iteration << ',' << format_double(s.relative_residual) << '\n';
  }
}

void write_matrix_market(std::ostream& os, const assembly::SymmetricSparseMatrix& k) {
  const auto ptr = k.row_ptr();
  const auto cols = k.cols();
  const auto vals = k.values();
  std::size_t lower = 0;
  for (int i = 0; i < k.size(); ++i) {
    for (auto q = ptr[i]; q < ptr[i + 1]; ++q) lower += cols[q] <= i;
  }
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << k.size() << ' ' << k.size() << ' ' << lower << '\n';
  for (int i = 0; i < k.size(); ++i) {
    for (auto q = ptr[i]; q < ptr[i + 1]; ++q) {
      if (cols[q] <= i) os << i + 1 << ' ' << cols[q] + 1 << ' ' << format_double(vals[q]) << '\n';
    }
  }
}

namespace {

nlohmann::json mesh_json(const mesh::StructuredMesh& m) {
  return {{"basis", m.spec().to_string()},
          {"lo", m.box().lo},
          {"hi", m.box().hi},
          {"elements_per_axis", m.elements_per_axis()},
          {"h", m.h()},
          {"dofs_per_axis", m.functions_per_axis()},
          {"dofs", m.num_dofs()}};
}

}  // namespace

nlohmann::json mesh_summary(const mesh::SuperposedModel& model) {
  auto global = mesh_json(model.global());
  int constrained = 0;
  for (int d = 0; d < model.global().num_dofs(); ++d) constrained += model.global().on_boundary(d);
  global["constrained_dofs"] = constrained;
  global["elements_inside_local"] = model.global_elements_inside();
  auto local = mesh_json(model.local());
  local["boundary_dofs"] = model.local().boundary_count();
  return {{"case", mesh::to_string(model.case_tag())},
          {"h_ratio", model.global().h() / model.local().h()},
          {"global", global},
          {"local", local}};
}

nlohmann::json point_json(const verify::PointResult& r) {
  const auto& c = r.config;
  nlohmann::json j = {
      {"method", verify::to_string(verify::method_of(c.global))},
      {"global_basis", c.global.to_string()},
      {"local_order", c.local_order},
      {"case", mesh::to_string(c.study_case)},
      {"elements", c.elements},
      {"quad_points", r.quad_points},
      {"h_G", r.h_global},
      {"h_L", r.h_local},
      {"dof", r.dof},
      {"nnz", r.nnz},
      {"l2_error", r.error.relative_l2},
      {"cg", {{"converged", r.cg.converged},
              {"breakdown", r.cg.breakdown},
              {"iterations", r.cg.iterations},
              {"max_iterations", r.cg.max_iterations},
              {"relative_residual", r.cg.relative_residual},
              {"seconds", r.cg.seconds}}},
      {"assembly_seconds", r.assembly_seconds},
      {"spd", spd_label(r)}};
  if (r.spd && !r.spd->positive_definite()) {
    j["spd_pivot"] = {{"step", r.spd->pivot_step},
                      {"row", r.spd->pivot_row},
                      {"value", r.spd->pivot_value},
                      {"tolerance", r.spd->tolerance}};
  }
  if (r.spd) j["spd_seconds"] = r.spd_seconds;
  if (!r.spd_error.empty()) j["spd_error"] = r.spd_error;
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  const auto tmp = std::filesystem::path(path.string() + suffix.str());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace sfem::report
