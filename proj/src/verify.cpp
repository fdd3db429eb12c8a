#include "sfem/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sfem/error.hpp"
#include "sfem/quadrature.hpp"

namespace sfem::verify {

using mesh::SuperposedModel;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double exact_solution(const Vec3& x) {
  return std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]) * std::sin(kTwoPi * x[2]) + 10.0;
}

double source_term(const Vec3& x) {
  return 12.0 * std::numbers::pi * std::numbers::pi * std::sin(kTwoPi * x[0]) *
         std::sin(kTwoPi * x[1]) * std::sin(kTwoPi * x[2]);
}

ManufacturedCase ManufacturedCase::sine() {
  return {"sine", exact_solution, source_term, exact_solution};
}

ManufacturedCase ManufacturedCase::constant(double c) {
  auto u = [c](const Vec3&) { return c; };
  return {"constant", u, {}, u};
}

// ---------------------------------------------------------------------------

Solution Solution::expand(const SuperposedModel& model, const assembly::DofPartition& partition,
                          std::span<const double> d) {
  if (static_cast<int>(d.size()) != partition.size()) {
    throw Error("Solution::expand: coefficient vector does not match the partition");
  }
  Solution s;
  s.global.resize(model.global().num_dofs());
  s.local.resize(model.local().num_dofs());
  for (std::size_t i = 0; i < s.global.size(); ++i) {
    const int r = partition.global_row[i];
    s.global[i] = r == assembly::DofPartition::kConstrained ? partition.global_value[i] : d[r];
  }
  for (std::size_t i = 0; i < s.local.size(); ++i) {
    const int r = partition.local_row[i];
    s.local[i] = r == assembly::DofPartition::kConstrained ? 0.0 : d[r];
  }
  return s;
}

double Solution::global_value(const SuperposedModel& model, const Vec3& x) const {
  const auto b = model.global().basis_at(x);
  double u = 0.0;
  for (int i = 0; i < b.size; ++i) u += b.values[i] * global[b.dofs[i]];
  return u;
}

double Solution::local_value(const SuperposedModel& model, const Vec3& x) const {
  const auto& lm = model.local();
  if (!lm.box().contains(x, 1e-12 * lm.h())) return 0.0;
  return local_value_in(model, lm.locate(x).element, x);
}

double Solution::local_value_in(const SuperposedModel& model, const std::array<int, 3>& element,
                                const Vec3& x) const {
  const auto b = model.local().basis_in_element(element, x);
  double u = 0.0;
  for (int i = 0; i < b.size; ++i) u += b.values[i] * local[b.dofs[i]];
  return u;
}

int error_quadrature_points(const SuperposedModel& model) {
  return std::max(model.global().spec().order, model.local().spec().order) + 2;
}

ErrorReport l2_error(const SuperposedModel& model, const Solution& solution,
                     const ScalarField& exact, int quad_points) {
  const int nq = quad_points > 0 ? quad_points : error_quadrature_points(model);
  const auto rule = quadrature::tensor3(nq);
  const auto& gm = model.global();
  const auto& lm = model.local();
  ErrorReport rep;

  const double gjac = std::pow(0.5 * gm.h(), 3);
  double denom = 0.0;
  for (int e = 0; e < gm.num_elements(); ++e) {
    const auto t = gm.element_triple(e);
    const bool inside = model.global_element_inside(e);
    for (const auto& qp : rule.points) {
      const Vec3 x = gm.map(t, qp.xi);
      const double u = exact(x);
      const double w = qp.weight * gjac;
      denom += w * u * u;
      if (!inside) {
        const auto b = gm.basis_in_element(t, x);
        double uh = 0.0;
        for (int i = 0; i < b.size; ++i) uh += b.values[i] * solution.global[b.dofs[i]];
        rep.outside_squared += w * (uh - u) * (uh - u);
      }
    }
  }

  const double ljac = std::pow(0.5 * lm.h(), 3);
  rep.local_elements.reserve(lm.num_elements());
  for (int e = 0; e < lm.num_elements(); ++e) {
    const auto t = lm.element_triple(e);
    double sq = 0.0;
    for (const auto& qp : rule.points) {
      const Vec3 x = lm.map(t, qp.xi);
      const double uh = solution.global_value(model, x) + solution.local_value_in(model, t, x);
      const double diff = uh - exact(x);
      sq += qp.weight * ljac * diff * diff;
    }
    rep.inside_squared += sq;
    rep.local_elements.push_back(
        {t, lm.map(t, {0.0, 0.0, 0.0}), sq, model.local_element_crosses(e)});
  }

  rep.denominator = std::sqrt(denom);
  rep.relative_l2 = std::sqrt(rep.numerator_squared()) / rep.denominator;
  return rep;
}

int quadrature_policy(mesh::Case c, int global_order, int local_order) {
  const int p = std::max(global_order, local_order);
  switch (c) {
    case mesh::Case::kA: return p + 8;
    case mesh::Case::kB: return p + 1;
    case mesh::Case::kCustom: break;
  }
  return p + 1;
}

std::string to_string(Method m) {
  return m == Method::kProposed ? "proposed" : "conventional";
}

Method method_of(const mesh::BasisSpec& global) {
  return global.family == basis::Family::kBSpline ? Method::kProposed : Method::kConventional;
}

// ---------------------------------------------------------------------------

PointResult run_model(const SuperposedModel& model, int quad_points, const PointConfig& config,
                      const ManufacturedCase& problem) {
  PointResult res;
  res.config = config;
  res.quad_points = quad_points;
  res.h_global = model.global().h();
  res.h_local = model.local().h();

  const auto t0 = std::chrono::steady_clock::now();
  const auto partition = assembly::DofPartition::dirichlet(model, problem.dirichlet);
  auto system = assembly::assemble_system(model, partition, quad_points, problem.source);
  res.assembly_seconds = seconds_since(t0);
  res.dof = system.matrix.size();
  res.nnz = system.matrix.nnz();

  auto cg = solver::cg_solve(system.matrix, system.load, config.cg);
  res.cg = std::move(cg.report);
  const auto solution = Solution::expand(model, partition, cg.solution);
  res.error = l2_error(model, solution, problem.exact);

  if (config.spd_check) {
    const auto t1 = std::chrono::steady_clock::now();
    try {
      res.spd = solver::cholesky_spd_test(system.matrix, config.cholesky);
    } catch (const SizeLimitError& e) {
      res.spd_error = e.what();
    }
    res.spd_seconds = seconds_since(t1);
  }
  return res;
}

PointResult run_point(const PointConfig& config, const ManufacturedCase& problem) {
  const auto model = mesh::make_study_model(config.global, config.elements, config.local_order,
                                            config.study_case);
  const int nq = config.quad_points.value_or(
      quadrature_policy(config.study_case, config.global.order, config.local_order));
  return run_model(model, nq, config, problem);
}

std::optional<double> fit_loglog_slope(const std::vector<double>& h,
                                       const std::vector<double>& error) {
  if (h.size() != error.size() || h.size() < 2) return std::nullopt;
  const double n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

ConvergenceSeries convergence_study(const PointConfig& base, const std::vector<int>& elements) {
  for (std::size_t i = 1; i < elements.size(); ++i) {
    if (elements[i] <= elements[i - 1]) {
      throw ConfigError("convergence_study: element counts must be strictly increasing");
    }
  }
  ConvergenceSeries series;
  std::vector<double> hs, errs;
  for (int ne : elements) {
    PointConfig cfg = base;
    cfg.elements = ne;
    PointResult r;
    try {
      r = run_point(cfg);
    } catch (const Error& e) {
      r.config = cfg;
      r.h_global = 2.0 / ne;
      r.failure = e.what();
    }
    if (r.failure.empty() && r.cg.converged) {
      hs.push_back(r.h_global);
      errs.push_back(r.error.relative_l2);
    }
    series.points.push_back(std::move(r));
  }
  series.slope = fit_loglog_slope(hs, errs);
  return series;
}

SensitivityTable quadrature_sensitivity(const PointConfig& base, int first_offset,
                                        int last_offset) {
  SensitivityTable table;
  table.base_order = std::max(base.global.order, base.local_order);
  for (int off = first_offset; off <= last_offset; ++off) {
    PointConfig cfg = base;
    cfg.quad_points = table.base_order + off;
    const auto r = run_point(cfg);
    SensitivityRow row;
    row.quad_points = *cfg.quad_points;
    row.l2_error = r.error.relative_l2;
    row.converged = r.cg.converged;
    if (!table.rows.empty()) {
      row.relative_change = std::abs(row.l2_error - table.rows.back().l2_error) / row.l2_error;
    }
    table.rows.push_back(row);
  }
  // Walk back from the last row while changes stay under the threshold.
  for (std::size_t i = table.rows.size(); i-- > 1;) {
    if (!(*table.rows[i].relative_change < kStabilizationThreshold)) break;
    table.stabilization_points = table.rows[i].quad_points;
  }
  return table;
}

SuperposedModel make_ratio_model(const mesh::BasisSpec& global, int elements, int local_order,
                                 int ratio_num, int ratio_den) {
  if (ratio_num <= 0 || ratio_den <= 0) throw ConfigError("ratio terms must be positive");
  const int g = std::gcd(ratio_num, ratio_den);
  const int step = ratio_den / g;
  int m = (elements / 2) - (elements / 2) % step;
  if (m == 0) m = step;
  if (m > elements) {
    throw GeometryError("make_ratio_model: too few global elements for ratio " +
                        std::to_string(ratio_num) + ":" + std::to_string(ratio_den));
  }
  mesh::GlobalMesh gm(global, mesh::Box::cube(0.0, 2.0), elements);
  const double edge = gm.axis(0).element_lo(m);
  mesh::LocalMesh lm(local_order, mesh::Box::cube(0.0, edge), m * (ratio_num / g) / step);
  return SuperposedModel(std::move(gm), std::move(lm), mesh::Case::kCustom);
}

DistributionResult error_distribution_experiment(const mesh::BasisSpec& global, int elements,
                                                 int ratio_num, int ratio_den,
                                                 int local_order) {
  const auto model = make_ratio_model(global, elements, local_order, ratio_num, ratio_den);
  PointConfig cfg;
  cfg.global = global;
  cfg.local_order = local_order;
  cfg.study_case = mesh::Case::kCustom;
  cfg.elements = elements;
  const int nq = std::max(global.order, local_order) + 1;
  cfg.quad_points = nq;
  DistributionResult out;
  out.point = run_model(model, nq, cfg, ManufacturedCase::sine());
  for (const auto& e : out.point.error.local_elements) {
    if (e.crossing) {
      out.max_crossing = std::max(out.max_crossing, e.squared_error);
      ++out.crossing_count;
    } else {
      out.max_non_crossing = std::max(out.max_non_crossing, e.squared_error);
    }
  }
  return out;
}

}  // namespace sfem::verify
