#include "gidm/group.hpp"

#include <cmath>
#include <string>

namespace gidm {

namespace detail {
void require_same_group(const GroupSpec& a, const GroupSpec& b,
                        const char* where) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(where) +
                                ": mismatched group instances");
  }
}
}  // namespace detail

Real canonical_angle(Real a) {
  Real r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod rounding can land exactly on 2pi
  return r;
}

GroupElement so2_element(Real angle) {
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("so2_element: non-finite angle");
  }
  return {so2(), canonical_angle(angle), 0};
}

GroupElement cyclic_element(int order, long k) {
  if (order < 1) throw std::invalid_argument("cyclic_element: order < 1");
  long r = k % order;
  if (r < 0) r += order;
  return {cyclic(order), 0.0, static_cast<int>(r)};
}

GroupElement identity(const GroupSpec& g) {
  return g.id == GroupId::SO2 ? so2_element(0.0) : cyclic_element(g.order, 0);
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  detail::require_same_group(a.group, b.group, "compose");
  if (a.group.id == GroupId::SO2) return so2_element(a.angle + b.angle);
  return cyclic_element(a.group.order, static_cast<long>(a.k) + b.k);
}

GroupElement inverse(const GroupElement& g) {
  if (g.group.id == GroupId::SO2) return so2_element(-g.angle);
  return cyclic_element(g.group.order, -static_cast<long>(g.k));
}

IrrepIndex irrep(const GroupSpec& g, long ell) {
  if (g.id == GroupId::Cyclic) {
    if (g.order < 1) throw std::invalid_argument("irrep: cyclic order < 1");
    long r = ell % g.order;
    if (r < 0) r += g.order;
    return {g, static_cast<int>(r), 1};
  }
  return {g, static_cast<int>(ell), 1};
}

Complex iur_scalar(int ell, Real angle) {
  Real phase = ell * angle;
  return {std::cos(phase), std::sin(phase)};
}

Complex iur_scalar(const IrrepIndex& idx, const GroupElement& g) {
  detail::require_same_group(idx.group, g.group, "iur_scalar");
  return iur_scalar(idx.ell, g.as_angle());
}

CMatrix iur_eval(const IrrepIndex& idx, const GroupElement& g) {
  CMatrix u(1, 1);
  u(0, 0) = iur_scalar(idx, g);
  return u;
}

QuadratureRule haar_quadrature(const GroupSpec& g, int nodes) {
  if (nodes < 1) throw std::invalid_argument("haar_quadrature: nodes < 1");
  QuadratureRule rule;
  if (g.id == GroupId::Cyclic) {
    if (nodes != g.order) {
      throw std::invalid_argument(
          "haar_quadrature: cyclic rule must use the group itself");
    }
    rule.nodes.reserve(nodes);
    for (int k = 0; k < nodes; ++k) rule.nodes.push_back(cyclic_element(g.order, k));
  } else {
    rule.nodes.reserve(nodes);
    for (int k = 0; k < nodes; ++k) {
      rule.nodes.push_back(so2_element(kTwoPi * k / nodes));
    }
  }
  rule.weights = Vector::Constant(nodes, 1.0 / nodes);
  return rule;
}

Vector act(const GroupElement& g, const Eigen::Ref<const Vector>& x,
           const ActionSpec& spec) {
  detail::require_same_group(g.group, spec.group, "act");
  Index n = x.size();
  if (spec.axis_u < 0 || spec.axis_v < 0 || spec.axis_u >= n ||
      spec.axis_v >= n || spec.axis_u == spec.axis_v) {
    throw std::invalid_argument("act: action axes out of range");
  }
  Real th = g.as_angle();
  Real c = std::cos(th), s = std::sin(th);
  Vector y = x;
  Real u = x[spec.axis_u], v = x[spec.axis_v];
  y[spec.axis_u] = c * u - s * v;
  y[spec.axis_v] = s * u + c * v;
  return y;
}

Matrix act_all(const GroupElement& g, const Eigen::Ref<const Matrix>& points,
               const ActionSpec& spec) {
  detail::require_same_group(g.group, spec.group, "act_all");
  Index n = points.cols();
  if (spec.axis_u < 0 || spec.axis_v < 0 || spec.axis_u >= n ||
      spec.axis_v >= n || spec.axis_u == spec.axis_v) {
    throw std::invalid_argument("act_all: action axes out of range");
  }
  Real th = g.as_angle();
  Real c = std::cos(th), s = std::sin(th);
  Matrix out = points;
  auto u = points.col(spec.axis_u);
  auto v = points.col(spec.axis_v);
  out.col(spec.axis_u) = c * u - s * v;
  out.col(spec.axis_v) = s * u + c * v;
  return out;
}

}  // namespace gidm
