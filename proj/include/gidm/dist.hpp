#pragma once

#include <optional>

#include "gidm/embed.hpp"

namespace gidm {

enum class DistanceKind {
  EquivariantWalk,
  EquivariantSym,
  Aligned,
  InvariantWalk,
  InvariantSym,
};

std::string distance_kind_name(DistanceKind k);
DistanceKind distance_kind_from_name(const std::string& name);

struct DistanceReport {
  DistanceKind kind = DistanceKind::EquivariantWalk;
  Real value = 0.0;
  std::optional<GroupElement> alignment;  // aligned kind only
  int t1 = 1;
  int t2 = 1;
  Real delta = 0.0;
};

/// Diffusion distance between the orbit-grid points (i, gi) and (j, gj):
/// the norm of the truncated equivariant embedding difference.
DistanceReport equivariant_distance(const SpectralData& spec, Index i,
                                    const GroupElement& gi, Index j,
                                    const GroupElement& gj, int t, Real delta,
                                    bool walk);

/// Minimum over the group of the equivariant distance between (i, alpha) and
/// (j, identity), with the minimizing element reported. The squared objective
/// is evaluated on a uniform angle grid through its frequency form with one
/// FFT pass; for the cyclic instance the grid is the group and the minimum is
/// exact, for SO(2) the best node gets one parabolic refinement. The reported
/// alignment alpha satisfies x_j ~ act(alpha, x_i) when the points share an
/// orbit.
DistanceReport aligned_distance(const SpectralData& spec, Index i, Index j,
                                int t, Real delta, bool walk, int grid_size);

/// Norm of the invariant-coordinate difference, reconstructing the implied
/// conjugate half from the stored one.
DistanceReport invariant_distance(const EmbeddingVector& a,
                                  const EmbeddingVector& b);

/// All-pairs distance matrix of the chosen kind; symmetric, zero diagonal.
Matrix pairwise_matrix(const SpectralData& spec, DistanceKind kind, int t,
                       Real delta, int grid_size = 1024);

/// Inner product of the symmetric invariant embeddings at full retained
/// spectrum; equals the Hilbert-Schmidt norm identity value checked by the
/// oracle suite.
Real hs_inner(const SpectralData& spec, Index i, Index j, int t);

}  // namespace gidm
