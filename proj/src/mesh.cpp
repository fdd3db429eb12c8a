#include "sfem/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "sfem/error.hpp"

namespace sfem::mesh {

using basis::Family;

BasisSpec BasisSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("basis '" + text + "': expected <family>:<order>");
  }
  const std::string name = text.substr(0, colon);
  BasisSpec spec;
  if (name == "bspline") {
    spec.family = Family::kBSpline;
  } else if (name == "lagrange") {
    spec.family = Family::kLagrange;
  } else {
    throw ConfigError("basis '" + text + "': unknown family '" + name + "'");
  }
  try {
    std::size_t used = 0;
    spec.order = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("basis '" + text + "': bad order");
  }
  return spec;
}

std::string BasisSpec::family_name() const {
  return family == Family::kBSpline ? "bspline" : "lagrange";
}

std::string BasisSpec::to_string() const {
  return family_name() + ":" + std::to_string(order);
}

bool Box::contains(const Vec3& x, double tol) const {
  for (int a = 0; a < 3; ++a) {
    if (x[a] < lo[a] - tol || x[a] > hi[a] + tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Axis::Axis(BasisSpec spec, double lo, double hi, int elements)
    : spec_(spec), lo_(lo), hi_(hi), elements_(elements) {
  if (!(hi > lo)) throw GeometryError("Axis: upper bound must exceed lower bound");
  if (elements < 1) throw GeometryError("Axis: need at least one element");
  h_ = (hi - lo) / elements;
  if (spec.family == Family::kLagrange) {
    lagrange_.emplace(spec.order);
    num_functions_ = spec.order * elements + 1;
  } else {
    bspline_.emplace(basis::KnotVector::open_uniform(spec.order, lo, hi, elements));
    num_functions_ = elements + spec.order;
  }
}

double Axis::element_lo(int e) const {
  return e == elements_ ? hi_ : lo_ + (hi_ - lo_) * e / elements_;
}

Axis::Location Axis::locate(double x) const {
  const double tol = 1e-12 * h_;
  if (x < lo_ - tol || x > hi_ + tol) {
    throw DomainError("locate: coordinate " + std::to_string(x) + " outside [" +
                      std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
  }
  const double s = (x - lo_) * elements_ / (hi_ - lo_);
  const int e = std::clamp(static_cast<int>(std::floor(s)), 0, elements_ - 1);
  const double xi = 2.0 * (x - lo_ - e * h_) / h_ - 1.0;
  return {e, xi};
}

double Axis::map(int element, double xi) const {
  return lo_ + element * h_ + 0.5 * (xi + 1.0) * h_;
}

basis::Eval1D Axis::eval_in_element(int element, double x) const {
  if (lagrange_) {
    const double a = element_lo(element);
    const double b = element_hi(element);
    // Parent coordinate with rounding noise at the faces removed.
    const double xi = std::clamp(2.0 * (x - a) / (b - a) - 1.0, -1.0, 1.0);
    auto out = lagrange_->eval(xi);
    const double scale = 2.0 / (b - a);
    for (int i = 0; i < out.count; ++i) out.derivs[i] *= scale;
    out.first = spec_.order * element;
    return out;
  }
  return bspline_->eval_in_span(element + spec_.order, x);
}

double Axis::dof_coordinate(int i) const {
  if (lagrange_) {
    return i == num_functions_ - 1 ? hi_ : lo_ + (hi_ - lo_) * i / (num_functions_ - 1);
  }
  return bspline_->knots().greville(i);
}

std::pair<int, int> Axis::support(int i) const {
  const int p = spec_.order;
  if (lagrange_) {
    if (i % p == 0) {
      const int v = i / p;
      return {std::max(v - 1, 0), std::min(v, elements_ - 1)};
    }
    return {i / p, i / p};
  }
  return {std::max(i - p, 0), std::min(i, elements_ - 1)};
}

// ---------------------------------------------------------------------------

namespace {

void check_box(const Box& box) {
  for (int a = 0; a < 3; ++a) {
    if (!(box.hi[a] > box.lo[a])) {
      throw GeometryError("box: upper bound must exceed lower bound on every axis");
    }
  }
  const double e0 = box.edge(0);
  for (int a = 1; a < 3; ++a) {
    if (std::abs(box.edge(a) - e0) > 1e-12 * e0) {
      throw GeometryError("box: elements must be cubes, so the box must be a cube");
    }
  }
}

}  // namespace

StructuredMesh::StructuredMesh(BasisSpec spec, Box box, int elements)
    : spec_(spec),
      box_((check_box(box), box)),
      elements_(elements),
      axes_{Axis(spec, box.lo[0], box.hi[0], elements), Axis(spec, box.lo[1], box.hi[1], elements),
            Axis(spec, box.lo[2], box.hi[2], elements)} {}

int StructuredMesh::num_dofs() const {
  const int n = functions_per_axis();
  return n * n * n;
}

int StructuredMesh::dof_index(int i, int j, int k) const {
  const int n = functions_per_axis();
  return (i * n + j) * n + k;
}

std::array<int, 3> StructuredMesh::dof_triple(int dof) const {
  const int n = functions_per_axis();
  return {dof / (n * n), (dof / n) % n, dof % n};
}

Vec3 StructuredMesh::dof_coordinate(int dof) const {
  const auto t = dof_triple(dof);
  return {axes_[0].dof_coordinate(t[0]), axes_[1].dof_coordinate(t[1]),
          axes_[2].dof_coordinate(t[2])};
}

int StructuredMesh::element_index(int i, int j, int k) const {
  return (i * elements_ + j) * elements_ + k;
}

std::array<int, 3> StructuredMesh::element_triple(int e) const {
  return {e / (elements_ * elements_), (e / elements_) % elements_, e % elements_};
}

Box StructuredMesh::element_box(const std::array<int, 3>& e) const {
  Box b;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = axes_[a].element_lo(e[a]);
    b.hi[a] = axes_[a].element_hi(e[a]);
  }
  return b;
}

StructuredMesh::PointLocation StructuredMesh::locate(const Vec3& x) const {
  PointLocation loc{};
  for (int a = 0; a < 3; ++a) {
    const auto l = axes_[a].locate(x[a]);
    loc.element[a] = l.element;
    loc.xi[a] = l.xi;
  }
  return loc;
}

Vec3 StructuredMesh::map(const std::array<int, 3>& element, const Vec3& xi) const {
  return {axes_[0].map(element[0], xi[0]), axes_[1].map(element[1], xi[1]),
          axes_[2].map(element[2], xi[2])};
}

PointBasis StructuredMesh::basis_in_element(const std::array<int, 3>& element,
                                            const Vec3& x) const {
  const auto e3 = basis::tensor_product(axes_[0].eval_in_element(element[0], x[0]),
                                        axes_[1].eval_in_element(element[1], x[1]),
                                        axes_[2].eval_in_element(element[2], x[2]));
  PointBasis out;
  out.size = e3.size;
  int l = 0;
  for (int a = 0; a < e3.count[0]; ++a) {
    for (int b = 0; b < e3.count[1]; ++b) {
      for (int c = 0; c < e3.count[2]; ++c, ++l) {
        out.dofs[l] = dof_index(e3.first[0] + a, e3.first[1] + b, e3.first[2] + c);
        out.values[l] = e3.values[l];
        out.grads[l] = e3.grads[l];
      }
    }
  }
  return out;
}

PointBasis StructuredMesh::basis_at(const Vec3& x) const {
  return basis_in_element(locate(x).element, x);
}

bool StructuredMesh::on_boundary(int dof) const {
  const int last = functions_per_axis() - 1;
  const auto t = dof_triple(dof);
  return std::ranges::any_of(t, [last](int i) { return i == 0 || i == last; });
}

// ---------------------------------------------------------------------------

GlobalMesh::GlobalMesh(BasisSpec spec, Box box, int elements)
    : StructuredMesh(spec, box, elements) {
  if (spec.family == Family::kBSpline && elements < spec.order) {
    throw GeometryError("GlobalMesh: B-spline mesh needs at least p elements per axis");
  }
}

LocalMesh::LocalMesh(int order, Box box, int elements)
    : StructuredMesh(BasisSpec{Family::kLagrange, order}, box, elements) {
  boundary_.resize(num_dofs());
  for (int d = 0; d < num_dofs(); ++d) boundary_[d] = on_boundary(d);
}

int LocalMesh::boundary_count() const {
  return static_cast<int>(std::ranges::count(boundary_, true));
}

GlobalMesh build_global(BasisSpec spec, Box box, int elements) {
  return GlobalMesh(spec, box, elements);
}

LocalMesh build_local(int order, Box box, int elements) {
  return LocalMesh(order, box, elements);
}

std::string to_string(Case c) {
  switch (c) {
    case Case::kA: return "A";
    case Case::kB: return "B";
    case Case::kCustom: return "custom";
  }
  return "custom";
}

Case parse_case(const std::string& text) {
  if (text == "A" || text == "a") return Case::kA;
  if (text == "B" || text == "b") return Case::kB;
  throw ConfigError("case '" + text + "': expected A or B");
}

// ---------------------------------------------------------------------------

namespace {

// Index of the global element boundary equal to x, or -1.
int aligned_boundary(const Axis& axis, double x) {
  const double s = (x - axis.lo()) / axis.h();
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-10) return -1;
  return static_cast<int>(r);
}

}  // namespace

SuperposedModel::SuperposedModel(GlobalMesh global, LocalMesh local, Case tag)
    : global_(std::move(global)), local_(std::move(local)), tag_(tag) {
  const Box& gb = global_.box();
  const Box& lb = local_.box();
  const double tol = 1e-12 * global_.h();
  for (int a = 0; a < 3; ++a) {
    if (lb.lo[a] < gb.lo[a] - tol || lb.hi[a] > gb.hi[a] + tol) {
      throw GeometryError("SuperposedModel: local box must lie inside the global box");
    }
    if (aligned_boundary(global_.axis(a), lb.lo[a]) < 0 ||
        aligned_boundary(global_.axis(a), lb.hi[a]) < 0) {
      throw GeometryError(
          "SuperposedModel: local box faces must lie on global element boundaries");
    }
  }
  if (tag_ != Case::kCustom) {
    const double ratio = global_.h() / local_.h();
    const double expected = tag_ == Case::kA ? 4.0 / 3.0 : 2.0;
    if (std::abs(ratio - expected) > 1e-10) {
      throw GeometryError("SuperposedModel: h_G:h_L does not match case " + to_string(tag_));
    }
  }

  std::array<std::pair<int, int>, 3> inside_range{};
  for (int a = 0; a < 3; ++a) {
    inside_range[a] = {aligned_boundary(global_.axis(a), lb.lo[a]),
                       aligned_boundary(global_.axis(a), lb.hi[a])};
  }
  inside_.resize(global_.num_elements());
  for (int e = 0; e < global_.num_elements(); ++e) {
    const auto t = global_.element_triple(e);
    bool in = true;
    for (int a = 0; a < 3; ++a) {
      in = in && t[a] >= inside_range[a].first && t[a] < inside_range[a].second;
    }
    inside_[e] = in;
  }

  // Per axis: does a global boundary fall strictly inside local interval i?
  std::array<std::vector<bool>, 3> crosses;
  for (int a = 0; a < 3; ++a) {
    const Axis& g = global_.axis(a);
    const Axis& l = local_.axis(a);
    crosses[a].resize(l.elements());
    for (int i = 0; i < l.elements(); ++i) {
      const double x0 = l.element_lo(i);
      const double x1 = l.element_hi(i);
      const double eps = 1e-10 * l.h();
      const int first = static_cast<int>(std::floor((x0 - g.lo()) / g.h() + 1e-10)) + 1;
      bool c = false;
      for (int k = first; k <= g.elements(); ++k) {
        const double b = g.element_lo(k);
        if (b >= x1 - eps) break;
        if (b > x0 + eps) c = true;
      }
      crosses[a][i] = c;
    }
  }
  crossing_.resize(local_.num_elements());
  for (int e = 0; e < local_.num_elements(); ++e) {
    const auto t = local_.element_triple(e);
    crossing_[e] = crosses[0][t[0]] || crosses[1][t[1]] || crosses[2][t[2]];
  }
}

int SuperposedModel::global_elements_inside() const {
  return static_cast<int>(std::ranges::count(inside_, true));
}

int local_box_elements(int global_elements, Case c) {
  const int half = global_elements / 2;
  const int m = c == Case::kA ? half - half % 3 : half;
  if (m < 1) {
    throw GeometryError("study model: " + std::to_string(global_elements) +
                        " global elements per axis is too coarse for case " + to_string(c));
  }
  return m;
}

int local_elements_for(int box_elements, Case c) {
  switch (c) {
    case Case::kA: return 4 * box_elements / 3;
    case Case::kB: return 2 * box_elements;
    case Case::kCustom: break;
  }
  throw GeometryError("local_elements_for: study cases are A or B");
}

SuperposedModel make_study_model(BasisSpec global, int global_elements, int local_order,
                                 Case c, double lo, double hi) {
  GlobalMesh g(global, Box::cube(lo, hi), global_elements);
  const int m = local_box_elements(global_elements, c);
  const double edge = g.axis(0).element_lo(m) - lo;
  LocalMesh l(local_order, Box::cube(lo, lo + edge), local_elements_for(m, c));
  return SuperposedModel(std::move(g), std::move(l), c);
}

}  // namespace sfem::mesh
