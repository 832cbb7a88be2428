#pragma once

#include <vector>

#include "gidm/spectral.hpp"

namespace gidm {

enum class EmbeddingKind {
  EquivariantWalk,
  EquivariantSym,
  InvariantWalk,
  InvariantSym,
  FirstMoment,
  Bispectrum,
};

std::string embedding_kind_name(EmbeddingKind k);
EmbeddingKind embedding_kind_from_name(const std::string& name);

/// Coordinate label. Equivariant coordinates use (ell1, n1); invariant pair
/// coordinates use (ell1, n1, n2); bispectrum triples use all five fields.
struct CoordLabel {
  int ell1 = 0;
  int ell2 = 0;
  int n1 = 0;
  int n2 = -1;
  int n3 = -1;
  friend bool operator==(const CoordLabel&, const CoordLabel&) = default;
};

/// Truncated embedding coordinates with their norm multiplicities.
///
/// weights[k] counts how many coordinates of the full (signed-frequency,
/// ordered-pair) family the stored coordinate k represents: implied negative
/// frequencies double SO(2) coordinates with ell != 0, and invariant kinds
/// storing only n1 <= n2 double the off-diagonal pairs. All norms and inner
/// products over EmbeddingVector already account for this.
struct EmbeddingVector {
  EmbeddingKind kind = EmbeddingKind::EquivariantWalk;
  int t1 = 1;
  int t2 = 1;  // == t1 except for the mixed-time invariant variant
  Real delta = 0.0;
  bool upper_pairs = false;
  std::vector<CoordLabel> labels;
  CVector coords;
  Vector weights;
  long skipped_triples = 0;  // bispectrum: frequency-sum overflow count
  long capped_triples = 0;   // bispectrum: dropped by the triple budget

  Index size() const { return coords.size(); }
};

EmbeddingVector equivariant_embed(const SpectralData& spec, Index i,
                                  const GroupElement& g, int t, Real delta,
                                  bool walk);

EmbeddingVector invariant_embed(const SpectralData& spec, Index i, int t,
                                Real delta, bool walk);

/// Invariant embedding correlating two diffusion times; reduces to
/// invariant_embed when t1 == t2 except that all ordered pairs are stored.
EmbeddingVector mixed_time_invariant_embed(const SpectralData& spec, Index i,
                                           int t1, int t2, Real delta);

/// Orbit marginal of the t-step walk from (i, identity): only the zero
/// frequency contributes. Entries are nonnegative and sum to one.
Vector first_moment(const SpectralData& spec, Index i, int t);

/// Third-order invariant moment coordinates over retained frequency triples
/// (ell1, ell2, ell1+ell2), largest eigenvalue products first, capped by
/// max_triples.
EmbeddingVector bispectrum_embed(const SpectralData& spec, Index i, int t,
                                 Real delta, long max_triples = 100000);

/// Weighted l2 inner product sum_k w_k a_k conj(b_k). For conjugate-closed
/// coordinate families the exact value is the real part; the imaginary part
/// is rounding residue.
Complex embedding_inner(const EmbeddingVector& a, const EmbeddingVector& b);

Real embedding_norm(const EmbeddingVector& a);
Real embedding_distance(const EmbeddingVector& a, const EmbeddingVector& b);

/// Value of the stored walk/sym eigenvector at a signed frequency; negative
/// frequencies resolve through conjugation for SO(2).
Complex eigvec_value(const SpectralData& spec, bool walk, int signed_ell,
                     int n, Index i);

}  // namespace gidm
