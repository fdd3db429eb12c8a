#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfem/verify.hpp"

namespace sfem::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the sfem tool.
enum ExitCode : int {
  kOk = 0,
  kPipelineError = 1,
  kUsageError = 2,
  kSizeLimit = 3,
  kCheckFailed = 4,
};

struct RunConfig {
  std::optional<verify::Method> method;
  mesh::BasisSpec global{basis::Family::kBSpline, 3};
  int local_order = 1;
  std::vector<mesh::Case> cases{mesh::Case::kA};
  std::vector<int> elements{6};
  std::optional<int> quad;
  bool spd = false;
  bool sensitivity = false;
  bool error_field = false;
  bool export_matrix = false;
  std::filesystem::path out = "sfem-out";
  int jobs = 1;
  bool resume = false;
  std::uint64_t seed = 1;
  int samples = 100;
  int ratio_num = 10;  ///< distribution subcommand
  int ratio_den = 3;
};

/// Throws ConfigError when the method, basis and local order do not form one
/// of the 15 supported pairings, or a numeric field is out of range.
void validate(const RunConfig& config);

/// Overlays the keys present in `j` onto `base`. Keys use the flag names
/// with underscores (global_basis, local_order, ...).
RunConfig apply_json(const nlohmann::json& j, RunConfig base);
nlohmann::json to_json(const RunConfig& config);

std::vector<int> parse_int_list(const std::string& text);
std::vector<mesh::Case> parse_cases(const std::string& text);
verify::Method parse_method(const std::string& text);

/// Short identifier of one grid point, e.g. "bspline3_q1_A_n6".
std::string point_tag(const mesh::BasisSpec& global, int local_order, mesh::Case c, int elements);

/// The 15 (global basis, local order) pairings, optionally restricted to one method.
std::vector<std::pair<mesh::BasisSpec, int>> pairings(std::optional<verify::Method> method);

struct RunSummary {
  std::vector<verify::PointResult> points;
  int solved = 0;
  int skipped = 0;
  bool size_limited = false;
};

/// One pairing over config.cases x config.elements. Writes convergence.csv,
/// per-point JSON and residual CSV, optional extras, and manifest.json.
RunSummary run_single(const RunConfig& config);

/// Every pairing x case x mesh. Points are stored under out/points and
/// reused when resume is set; matrix.csv holds one row per grid point.
RunSummary run_matrix(const RunConfig& config);

/// Full command line; returns an ExitCode.
int main(int argc, char** argv);

}  // namespace sfem::cli
