#include "sfem/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"
#include "sfem/report.hpp"

namespace sfem::cli {

namespace fs = std::filesystem;
using verify::Method;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string join_cases(const std::vector<mesh::Case>& cases) {
  std::string s;
  for (auto c : cases) s += (s.empty() ? "" : ",") + mesh::to_string(c);
  return s;
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

nlohmann::json versions() {
  return {{"sfem", kVersion},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"cli11", CLI11_VERSION}};
}

/// Runs task(i) for i in [0, count) on `jobs` threads.
template <class Task>
void parallel_for(int count, int jobs, Task&& task) {
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min(jobs, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

verify::PointConfig point_config(const RunConfig& cfg, const mesh::BasisSpec& global, int q,
                                 mesh::Case c, int elements) {
  verify::PointConfig pc;
  pc.global = global;
  pc.local_order = q;
  pc.study_case = c;
  pc.elements = elements;
  pc.quad_points = cfg.quad;
  pc.spd_check = cfg.spd;
  return pc;
}

std::string to_text(auto&& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw ConfigError("not an integer list: '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

std::vector<mesh::Case> parse_cases(const std::string& text) {
  if (text == "both" || text == "all") return {mesh::Case::kA, mesh::Case::kB};
  std::vector<mesh::Case> out;
  for (const auto& item : split(text, ',')) out.push_back(mesh::parse_case(item));
  if (out.empty()) throw ConfigError("empty case list");
  return out;
}

Method parse_method(const std::string& text) {
  if (text == "proposed") return Method::kProposed;
  if (text == "conventional") return Method::kConventional;
  throw ConfigError("unknown method '" + text + "' (expected proposed or conventional)");
}

std::string point_tag(const mesh::BasisSpec& global, int local_order, mesh::Case c,
                      int elements) {
  return global.family_name() + std::to_string(global.order) + "_q" +
         std::to_string(local_order) + "_" + mesh::to_string(c) + "_n" + std::to_string(elements);
}

std::vector<std::pair<mesh::BasisSpec, int>> pairings(std::optional<Method> method) {
  std::vector<std::pair<mesh::BasisSpec, int>> out;
  if (!method || *method == Method::kProposed) {
    for (int p : {2, 3})
      for (int q : {1, 2, 3}) out.push_back({{basis::Family::kBSpline, p}, q});
  }
  if (!method || *method == Method::kConventional) {
    for (int p : {1, 2, 3})
      for (int q : {1, 2, 3}) out.push_back({{basis::Family::kLagrange, p}, q});
  }
  return out;
}

void validate(const RunConfig& c) {
  const Method implied = verify::method_of(c.global);
  if (c.method && *c.method != implied) {
    throw ConfigError("method " + verify::to_string(*c.method) + " does not use a " +
                      c.global.family_name() + " global basis");
  }
  if (implied == Method::kProposed && (c.global.order < 2 || c.global.order > 3)) {
    throw ConfigError("proposed method needs a B-spline global basis of order 2 or 3, got " +
                      c.global.to_string());
  }
  if (implied == Method::kConventional && (c.global.order < 1 || c.global.order > 3)) {
    throw ConfigError("conventional method needs a Lagrange global basis of order 1..3, got " +
                      c.global.to_string());
  }
  if (c.local_order < 1 || c.local_order > 3) {
    throw ConfigError("local order must be 1, 2 or 3, got " + std::to_string(c.local_order));
  }
  if (c.cases.empty()) throw ConfigError("no case selected");
  if (c.elements.empty()) throw ConfigError("no element count given");
  for (int ne : c.elements) {
    if (ne < 2) throw ConfigError("elements per axis must be >= 2, got " + std::to_string(ne));
  }
  if (c.quad && (*c.quad < 1 || *c.quad > quadrature::kMaxPoints)) {
    throw ConfigError("quadrature override must be in 1.." +
                      std::to_string(quadrature::kMaxPoints));
  }
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.samples < 1) throw ConfigError("samples must be >= 1");
  if (c.ratio_num < 1 || c.ratio_den < 1) throw ConfigError("ratio terms must be positive");
}

RunConfig apply_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "method") {
        c.method = parse_method(v.get<std::string>());
      } else if (key == "global_basis") {
        c.global = mesh::BasisSpec::parse(v.get<std::string>());
      } else if (key == "local_order") {
        c.local_order = v.get<int>();
      } else if (key == "case") {
        c.cases = v.is_array() ? parse_cases(
                                     [&] {
                                       std::string s;
                                       for (const auto& x : v) s += (s.empty() ? "" : ",") + x.get<std::string>();
                                       return s;
                                     }())
                               : parse_cases(v.get<std::string>());
      } else if (key == "elems") {
        if (v.is_array()) c.elements = v.get<std::vector<int>>();
        else if (v.is_number_integer()) c.elements = {v.get<int>()};
        else c.elements = parse_int_list(v.get<std::string>());
      } else if (key == "quad") {
        if (v.is_null()) c.quad.reset();
        else c.quad = v.get<int>();
      } else if (key == "spd") {
        c.spd = v.get<bool>();
      } else if (key == "sensitivity") {
        c.sensitivity = v.get<bool>();
      } else if (key == "error_field") {
        c.error_field = v.get<bool>();
      } else if (key == "export_matrix") {
        c.export_matrix = v.get<bool>();
      } else if (key == "out") {
        c.out = v.get<std::string>();
      } else if (key == "jobs") {
        c.jobs = v.get<int>();
      } else if (key == "resume") {
        c.resume = v.get<bool>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "samples") {
        c.samples = v.get<int>();
      } else if (key == "ratio") {
        const auto parts = split(v.get<std::string>(), ':');
        if (parts.size() != 2) throw ConfigError("ratio must look like 10:3");
        c.ratio_num = parse_int_list(parts[0]).at(0);
        c.ratio_den = parse_int_list(parts[1]).at(0);
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"global_basis", c.global.to_string()},
                      {"method", verify::to_string(verify::method_of(c.global))},
                      {"local_order", c.local_order},
                      {"case", join_cases(c.cases)},
                      {"elems", c.elements},
                      {"quad", c.quad ? nlohmann::json(*c.quad) : nlohmann::json(nullptr)},
                      {"spd", c.spd},
                      {"sensitivity", c.sensitivity},
                      {"error_field", c.error_field},
                      {"export_matrix", c.export_matrix},
                      {"out", c.out.string()},
                      {"jobs", c.jobs},
                      {"resume", c.resume},
                      {"seed", c.seed}};
  return j;
}

// ---------------------------------------------------------------------------

RunSummary run_single(const RunConfig& cfg) {
  validate(cfg);
  fs::create_directories(cfg.out);
  const auto t0 = std::chrono::steady_clock::now();

  struct Job {
    mesh::Case c;
    int elements;
  };
  std::vector<Job> jobs;
  for (auto c : cfg.cases)
    for (int ne : cfg.elements) jobs.push_back({c, ne});

  RunSummary summary;
  summary.points.resize(jobs.size());
  std::vector<nlohmann::json> extras(jobs.size());

  parallel_for(static_cast<int>(jobs.size()), cfg.jobs, [&](int i) {
    const auto& job = jobs[i];
    const auto pc = point_config(cfg, cfg.global, cfg.local_order, job.c, job.elements);
    const auto tag = point_tag(cfg.global, cfg.local_order, job.c, job.elements);
    const auto model =
        mesh::make_study_model(cfg.global, job.elements, cfg.local_order, job.c);
    const int nq = cfg.quad.value_or(
        verify::quadrature_policy(job.c, cfg.global.order, cfg.local_order));
    auto r = verify::run_model(model, nq, pc, verify::ManufacturedCase::sine());

    auto j = report::point_json(r);
    j["mesh"] = report::mesh_summary(model);
    nlohmann::json files = {{"residuals", "residuals_" + tag + ".csv"}};
    report::write_file_atomically(cfg.out / ("residuals_" + tag + ".csv"), to_text([&](auto& os) {
                                    report::write_residual_history_csv(os, r.cg);
                                  }));
    if (cfg.error_field) {
      files["error_field"] = "error_field_" + tag + ".csv";
      report::write_file_atomically(cfg.out / files["error_field"].get<std::string>(),
                                    to_text([&](auto& os) {
                                      report::write_error_field_csv(os, r.error);
                                    }));
    }
    if (cfg.sensitivity) {
      const auto table = verify::quadrature_sensitivity(pc);
      files["sensitivity"] = "sensitivity_" + tag + ".csv";
      report::write_file_atomically(cfg.out / files["sensitivity"].get<std::string>(),
                                    to_text([&](auto& os) {
                                      report::write_sensitivity_csv(os, table);
                                    }));
      j["stabilization_points"] = table.stabilization_points
                                      ? nlohmann::json(*table.stabilization_points)
                                      : nlohmann::json(nullptr);
    }
    if (cfg.export_matrix) {
      const auto part = assembly::DofPartition::dirichlet(model, verify::exact_solution);
      const auto sys = assembly::assemble_system(model, part, nq, verify::source_term);
      files["matrix"] = "matrix_" + tag + ".mtx";
      report::write_file_atomically(cfg.out / files["matrix"].get<std::string>(),
                                    to_text([&](auto& os) {
                                      report::write_matrix_market(os, sys.matrix);
                                    }));
    }
    j["files"] = files;
    report::write_file_atomically(cfg.out / ("solve_" + tag + ".json"), j.dump(2) + "\n");
    extras[i] = {{"tag", tag},
                 {"assembly_seconds", r.assembly_seconds},
                 {"cg_seconds", r.cg.seconds},
                 {"spd_seconds", r.spd_seconds}};
    summary.points[i] = std::move(r);
  });
  summary.solved = static_cast<int>(jobs.size());

  report::write_file_atomically(cfg.out / "convergence.csv", to_text([&](auto& os) {
                                  report::write_convergence_csv(os, summary.points);
                                }));

  nlohmann::json slopes = nlohmann::json::object();
  for (auto c : cfg.cases) {
    std::vector<double> h, e;
    for (const auto& r : summary.points) {
      if (r.config.study_case == c && r.cg.converged) {
        h.push_back(r.h_global);
        e.push_back(r.error.relative_l2);
      }
    }
    const auto s = verify::fit_loglog_slope(h, e);
    slopes[mesh::to_string(c)] = s ? nlohmann::json(*s) : nlohmann::json(nullptr);
  }
  for (const auto& r : summary.points) summary.size_limited |= !r.spd_error.empty();

  const nlohmann::json manifest = {
      {"command", "run"},
      {"created", now_iso()},
      {"config", to_json(cfg)},
      {"versions", versions()},
      {"slopes", slopes},
      {"points", extras},
      {"wall_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  report::write_file_atomically(cfg.out / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

RunSummary run_matrix(const RunConfig& cfg) {
  validate(cfg);
  const auto points_dir = cfg.out / "points";
  fs::create_directories(points_dir);
  const auto t0 = std::chrono::steady_clock::now();

  struct Job {
    mesh::BasisSpec global;
    int q;
    mesh::Case c;
    int elements;
    std::string tag;
  };
  std::vector<Job> jobs;
  for (const auto& [g, q] : pairings(cfg.method))
    for (auto c : cfg.cases)
      for (int ne : cfg.elements) jobs.push_back({g, q, c, ne, point_tag(g, q, c, ne)});

  std::vector<std::string> rows(jobs.size());
  std::vector<nlohmann::json> timings(jobs.size());
  std::vector<char> reused(jobs.size(), 0);
  RunSummary summary;
  summary.points.resize(jobs.size());
  std::mutex flag_mutex;

  parallel_for(static_cast<int>(jobs.size()), cfg.jobs, [&](int i) {
    const auto& job = jobs[i];
    const auto file = points_dir / (job.tag + ".json");
    if (cfg.resume && fs::exists(file)) {
      std::ifstream in(file);
      const auto j = nlohmann::json::parse(in, nullptr, false);
      if (!j.is_discarded() && j.contains("csv_row")) {
        rows[i] = j["csv_row"].get<std::string>();
        timings[i] = {{"tag", job.tag}, {"reused", true}};
        reused[i] = 1;
        return;
      }
    }
    verify::PointResult r;
    const auto pc = point_config(cfg, job.global, job.q, job.c, job.elements);
    try {
      r = verify::run_point(pc);
    } catch (const Error& e) {
      r.config = pc;
      r.failure = e.what();
    }
    rows[i] = to_text([&](auto& os) { report::write_convergence_row(os, r); });
    auto j = report::point_json(r);
    j["csv_row"] = rows[i];
    report::write_file_atomically(file, j.dump(2) + "\n");
    timings[i] = {{"tag", job.tag},
                  {"assembly_seconds", r.assembly_seconds},
                  {"cg_seconds", r.cg.seconds},
                  {"spd_seconds", r.spd_seconds}};
    if (!r.spd_error.empty()) {
      std::lock_guard lock(flag_mutex);
      summary.size_limited = true;
    }
    summary.points[i] = std::move(r);
  });

  for (char r : reused) (r ? summary.skipped : summary.solved)++;

  std::ostringstream csv;
  report::write_convergence_header(csv);
  for (const auto& row : rows) csv << row;
  report::write_file_atomically(cfg.out / "matrix.csv", csv.str());

  const nlohmann::json manifest = {
      {"command", "matrix"},
      {"created", now_iso()},
      {"config", to_json(cfg)},
      {"versions", versions()},
      {"grid_points", jobs.size()},
      {"solved", summary.solved},
      {"skipped", summary.skipped},
      {"points", timings},
      {"wall_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
  report::write_file_atomically(cfg.out / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------

namespace {

int run_distribution(const RunConfig& cfg) {
  if (cfg.elements.size() != 1) throw ConfigError("distribution takes a single --elems value");
  fs::create_directories(cfg.out);
  const auto res = verify::error_distribution_experiment(cfg.global, cfg.elements.front(),
                                                         cfg.ratio_num, cfg.ratio_den,
                                                         cfg.local_order);
  const auto tag = cfg.global.family_name() + std::to_string(cfg.global.order) + "_ratio" +
                   std::to_string(cfg.ratio_num) + "-" + std::to_string(cfg.ratio_den);
  report::write_file_atomically(cfg.out / ("error_field_" + tag + ".csv"), to_text([&](auto& os) {
                                  report::write_error_field_csv(os, res.point.error);
                                }));
  nlohmann::json j = {{"command", "distribution"},
                      {"created", now_iso()},
                      {"config", to_json(cfg)},
                      {"versions", versions()},
                      {"ratio", std::to_string(cfg.ratio_num) + ":" + std::to_string(cfg.ratio_den)},
                      {"max_crossing", res.max_crossing},
                      {"max_non_crossing", res.max_non_crossing},
                      {"crossing_elements", res.crossing_count},
                      {"crossing_ratio", res.ratio()},
                      {"point", report::point_json(res.point)}};
  report::write_file_atomically(cfg.out / ("distribution_" + tag + ".json"), j.dump(2) + "\n");
  std::cout << tag << " max_crossing=" << report::format_double(res.max_crossing)
            << " max_non_crossing=" << report::format_double(res.max_non_crossing)
            << " ratio=" << report::format_double(res.ratio()) << '\n';
  return kOk;
}

// Random-point partition-of-unity and finite-difference gradient checks on
// every global basis family.
int run_check(const RunConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool all_ok = true;
  const std::vector<mesh::BasisSpec> specs = {{basis::Family::kBSpline, 2},
                                              {basis::Family::kBSpline, 3},
                                              {basis::Family::kLagrange, 1},
                                              {basis::Family::kLagrange, 2},
                                              {basis::Family::kLagrange, 3}};
  for (const auto& spec : specs) {
    const mesh::GlobalMesh m(spec, mesh::Box::cube(0.0, 2.0), 5);
    std::vector<double> coef(m.num_dofs());
    for (auto& c : coef) c = unit(rng) - 0.5;
    auto field = [&](const mesh::Vec3& x) {
      const auto b = m.basis_at(x);
      double u = 0.0;
      for (int i = 0; i < b.size; ++i) u += b.values[i] * coef[b.dofs[i]];
      return u;
    };
    double pou = 0.0, grad = 0.0;
    const double step = 1e-6;
    for (int s = 0; s < cfg.samples; ++s) {
      // Keep FD stencils inside one element so the field is smooth there.
      const auto e = std::array<int, 3>{static_cast<int>(unit(rng) * 5),
                                        static_cast<int>(unit(rng) * 5),
                                        static_cast<int>(unit(rng) * 5)};
      const mesh::Vec3 xi{unit(rng) * 1.8 - 0.9, unit(rng) * 1.8 - 0.9, unit(rng) * 1.8 - 0.9};
      const auto x = m.map(e, xi);
      const auto b = m.basis_in_element(e, x);
      double sum = 0.0;
      std::array<double, 3> g{};
      for (int i = 0; i < b.size; ++i) {
        sum += b.values[i];
        for (int a = 0; a < 3; ++a) g[a] += b.grads[i][a] * coef[b.dofs[i]];
      }
      pou = std::max(pou, std::abs(sum - 1.0));
      for (int a = 0; a < 3; ++a) {
        auto xp = x, xm = x;
        xp[a] += step;
        xm[a] -= step;
        grad = std::max(grad, std::abs((field(xp) - field(xm)) / (2 * step) - g[a]));
      }
    }
    const bool ok = pou <= 1e-13 && grad <= 1e-6;
    all_ok &= ok;
    std::cout << (ok ? "PASS " : "FAIL ") << spec.to_string()
              << " partition_of_unity=" << report::format_double(pou)
              << " fd_gradient=" << report::format_double(grad) << '\n';
  }
  return all_ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"s-version FEM experiment runner"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Flags {
    std::string config, method, global_basis, cases, elems, out, ratio;
    int local_order = 0, quad = 0, jobs = 0, samples = 0;
    std::uint64_t seed = 0;
    bool spd = false, sensitivity = false, error_field = false, export_matrix = false,
         resume = false;
  } f;
  std::vector<CLI::Option*> opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file; flags override its keys")
        ->check(CLI::ExistingFile);
    sub->add_option("--method", f.method, "proposed | conventional");
    sub->add_option("--global-basis", f.global_basis, "bspline:2|3 or lagrange:1|2|3");
    sub->add_option("--local-order", f.local_order, "local Lagrange order q (1..3)");
    sub->add_option("--elems", f.elems, "global elements per axis, single or comma list");
    sub->add_option("--out", f.out, "output directory");
  };
  auto add_study = [&](CLI::App* sub) {
    sub->add_option("--case", f.cases, "A, B, or A,B");
    sub->add_option("--quad", f.quad, "Gauss points per axis for assembly (overrides the case rule)");
    sub->add_flag("--spd", f.spd, "run the Cholesky positive-definiteness test");
    sub->add_option("--jobs", f.jobs, "worker threads");
  };

  auto* run = app.add_subcommand("run", "one pairing over the given cases and meshes");
  add_common(run);
  add_study(run);
  run->add_flag("--sensitivity", f.sensitivity, "sweep Gauss points p+1..p+10");
  run->add_flag("--error-field", f.error_field, "write the per-element error field");
  run->add_flag("--export-matrix", f.export_matrix, "write K in Matrix Market format");

  auto* matrix = app.add_subcommand("matrix", "every pairing x case x mesh");
  add_common(matrix);
  add_study(matrix);
  matrix->add_flag("--resume", f.resume, "reuse point outputs that already exist");

  auto* dist = app.add_subcommand("distribution", "per-element error at an extreme size ratio");
  add_common(dist);
  dist->add_option("--ratio", f.ratio, "h_G:h_L, e.g. 10:3");

  auto* check = app.add_subcommand("check", "random-point basis property checks");
  check->add_option("--seed", f.seed, "random seed");
  check->add_option("--samples", f.samples, "points per basis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  auto given = [](CLI::App* sub, const char* name) {
    try {
      return sub->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };

  try {
    CLI::App* sub = app.get_subcommands().front();
    RunConfig cfg;
    if (sub == dist) cfg.cases = {mesh::Case::kCustom};
    bool basis_given = given(sub, "--global-basis");
    if (given(sub, "--config")) {
      std::ifstream in(f.config);
      const auto j = nlohmann::json::parse(in, nullptr, false);
      if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + f.config);
      cfg = apply_json(j, cfg);
      basis_given |= j.is_object() && j.contains("global_basis");
    }
    nlohmann::json overlay = nlohmann::json::object();
    if (given(sub, "--method")) overlay["method"] = f.method;
    if (given(sub, "--global-basis")) overlay["global_basis"] = f.global_basis;
    if (given(sub, "--local-order")) overlay["local_order"] = f.local_order;
    if (given(sub, "--case")) overlay["case"] = f.cases;
    if (given(sub, "--elems")) overlay["elems"] = f.elems;
    if (given(sub, "--quad")) overlay["quad"] = f.quad;
    if (given(sub, "--spd")) overlay["spd"] = f.spd;
    if (given(sub, "--sensitivity")) overlay["sensitivity"] = f.sensitivity;
    if (given(sub, "--error-field")) overlay["error_field"] = f.error_field;
    if (given(sub, "--export-matrix")) overlay["export_matrix"] = f.export_matrix;
    if (given(sub, "--out")) overlay["out"] = f.out;
    if (given(sub, "--jobs")) overlay["jobs"] = f.jobs;
    if (given(sub, "--resume")) overlay["resume"] = f.resume;
    if (given(sub, "--seed")) overlay["seed"] = f.seed;
    if (given(sub, "--samples")) overlay["samples"] = f.samples;
    if (given(sub, "--ratio")) overlay["ratio"] = f.ratio;
    cfg = apply_json(overlay, cfg);
    // A bare --method picks that method's lowest-order global basis.
    if (cfg.method && !basis_given && verify::method_of(cfg.global) != *cfg.method) {
      cfg.global = *cfg.method == Method::kProposed ? mesh::BasisSpec{basis::Family::kBSpline, 2}
                                                    : mesh::BasisSpec{basis::Family::kLagrange, 1};
    }

    if (sub == check) return run_check(cfg);
    if (sub == dist) {
      validate(cfg);
      return run_distribution(cfg);
    }
    const auto summary = sub == run ? run_single(cfg) : run_matrix(cfg);
    for (const auto& r : summary.points) {
      if (r.dof == 0 && r.failure.empty()) continue;  // reused point
      std::cout << point_tag(r.config.global, r.config.local_order, r.config.study_case,
                             r.config.elements)
                << " dof=" << r.dof << " l2_error=" << report::format_double(r.error.relative_l2)
                << " cg_iters=" << r.cg.iterations
                << " converged=" << (r.cg.converged ? "true" : "false")
                << " spd=" << report::spd_label(r)
                << (r.failure.empty() ? "" : " failure=\"" + r.failure + "\"") << '\n';
    }
    std::cout << "solved=" << summary.solved << " skipped=" << summary.skipped
              << " out=" << cfg.out.string() << '\n';
    if (summary.size_limited) {
      std::cerr << "sfem: SPD test skipped for at least one point (profile size limit)\n";
      return kSizeLimit;
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "sfem: usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SizeLimitError& e) {
    std::cerr << "sfem: size limit: " << e.what() << '\n';
    return kSizeLimit;
  } catch (const std::exception& e) {
    std::cerr << "sfem: error: " << e.what() << '\n';
    return kPipelineError;
  }
}

}  // namespace sfem::cli
