#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sfem/report.hpp"

using namespace sfem;

TEST(Format, SeventeenSignificantDigits) {
  EXPECT_EQ(report::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(report::format_double(1.0 / 6.0), "0.16666666666666666");
  EXPECT_EQ(std::stod(report::format_double(2.0 / 3.0)), 2.0 / 3.0);
}

TEST(Csv, ConvergenceSchemaIsStable) {
  std::ostringstream os;
  report::write_convergence_csv(os, {});
  EXPECT_EQ(os.str(), "case,global_family,global_order,local_order,h_G,dof,l2_error,cg_iters,cg_converged,spd\n");

  verify::PointResult r;
  r.config.global = {basis::Family::kLagrange, 2};
  r.config.local_order = 3;
  r.config.study_case = mesh::Case::kB;
  r.h_global = 1.0 / 3.0;
  r.dof = 42;
  r.error.relative_l2 = 0.5;
  r.cg.iterations = 7;
  std::ostringstream row;
  report::write_convergence_row(row, r);
  EXPECT_EQ(row.str(), "B,lagrange,2,3,0.33333333333333331,42,0.5,7,false,na\n");
}

TEST(Csv, ErrorFieldSensitivityAndResiduals) {
  verify::ErrorReport e;
  e.local_elements.push_back({{1, 2, 3}, {0.5, 0.25, 0.125}, 1e-3, true});
  std::ostringstream a;
  report::write_error_field_csv(a, e);
  EXPECT_EQ(a.str(), "i,j,k,cx,cy,cz,squared_error,crossing\n1,2,3,0.5,0.25,0.125,0.001,1\n");

  verify::SensitivityTable t;
  t.rows.push_back({4, 0.25, std::nullopt, true});
  t.rows.push_back({5, 0.5, 0.5, false});
  std::ostringstream b;
  report::write_sensitivity_csv(b, t);
  EXPECT_EQ(b.str(), "quad_points,l2_error,relative_change,cg_converged\n4,0.25,,true\n5,0.5,0.5,false\n");

  solver::SolveReport s;
  s.history = {{0, 1.0}, {1, 0.125}};
  std::ostringstream c;
  report::write_residual_history_csv(c, s);
  EXPECT_EQ(c.str(), "iteration,relative_residual\n0,1\n1,0.125\n");
}

TEST(MatrixMarket, LowerTriangleOneBased) {
  const auto k = assembly::SymmetricSparseMatrix::from_dense(3, std::vector<double>{4, 1, 0, 1, 3, 0.5, 0, 0.5, 2});
  std::ostringstream os;
  report::write_matrix_market(os, k);
  EXPECT_EQ(os.str(),
            "%%MatrixMarket matrix coordinate real symmetric\n3 3 5\n1 1 4\n2 1 1\n2 2 3\n3 2 0.5\n3 3 2\n");
}

TEST(Json, MeshSummaryAndAtomicWrite) {
  const auto model = mesh::make_study_model({basis::Family::kBSpline, 3}, 6, 1, mesh::Case::kA);
  const auto j = report::mesh_summary(model);
  EXPECT_EQ(j["case"], "A");
  EXPECT_EQ(j["global"]["dofs"], 729);
  EXPECT_EQ(j["global"]["elements_inside_local"], 27);
  EXPECT_EQ(j["local"]["elements_per_axis"], 4);
  EXPECT_NEAR(j["h_ratio"].get<double>(), 4.0 / 3.0, 1e-13);

  const auto dir = std::filesystem::temp_directory_path() / "sfem_report_test";
  std::filesystem::create_directories(dir);
  report::write_file_atomically(dir / "a.txt", "hello\n");
  std::ifstream in(dir / "a.txt");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "hello");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
  EXPECT_EQ(files, 1);
  std::filesystem::remove_all(dir);
}
