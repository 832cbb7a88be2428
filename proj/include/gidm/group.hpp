#pragma once

#include <vector>

#include "gidm/types.hpp"

namespace gidm {

/// Which compact group instance a value belongs to. Cyclic carries its order.
enum class GroupId { SO2, Cyclic };

struct GroupSpec {
  GroupId id = GroupId::SO2;
  int order = 0;  // group order for Cyclic, 0 for SO2
  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

inline GroupSpec so2() { return {GroupId::SO2, 0}; }
inline GroupSpec cyclic(int order) { return {GroupId::Cyclic, order}; }

/// One group point. SO(2) stores an angle canonicalized to [0, 2pi);
/// the cyclic group stores an index canonicalized to {0, ..., order-1}.
struct GroupElement {
  GroupSpec group;
  Real angle = 0.0;
  int k = 0;

  /// Rotation angle realized by this element.
  Real as_angle() const {
    return group.id == GroupId::SO2 ? angle : kTwoPi * k / group.order;
  }
};

GroupElement so2_element(Real angle);
GroupElement cyclic_element(int order, long k);
GroupElement identity(const GroupSpec& g);
GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& g);

Real canonical_angle(Real a);

/// Frequency label for one irreducible unitary representation. Both
/// implemented instances are abelian, so dim is always 1; it is carried so
/// matrix-valued IUR families can be added behind the same interface.
struct IrrepIndex {
  GroupSpec group;
  int ell = 0;
  int dim = 1;
};

IrrepIndex irrep(const GroupSpec& g, long ell);

/// U^ell evaluated at g, as a dim x dim unitary matrix.
CMatrix iur_eval(const IrrepIndex& idx, const GroupElement& g);

/// Scalar fast path for the abelian instances: e^{i ell theta}.
Complex iur_scalar(const IrrepIndex& idx, const GroupElement& g);
Complex iur_scalar(int ell, Real angle);

/// Nodes and weights discretizing the Haar integral; weights sum to one.
/// For SO(2) the rule is the uniform M-node grid, exact on trigonometric
/// polynomials of degree < M; for the cyclic group the nodes are the group.
struct QuadratureRule {
  std::vector<GroupElement> nodes;
  Vector weights;
};

QuadratureRule haar_quadrature(const GroupSpec& g, int nodes);

/// Rotated coordinate pair defining how the group acts on ambient points;
/// coordinates outside the pair are fixed.
struct ActionSpec {
  GroupSpec group;
  int axis_u = 0;
  int axis_v = 1;
  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

Vector act(const GroupElement& g, const Eigen::Ref<const Vector>& x,
           const ActionSpec& spec);

/// Rotates every row of points by g. Used to build per-node point tables.
Matrix act_all(const GroupElement& g, const Eigen::Ref<const Matrix>& points,
               const ActionSpec& spec);

namespace detail {
void require_same_group(const GroupSpec& a, const GroupSpec& b,
                        const char* where);
}

}  // namespace gidm
