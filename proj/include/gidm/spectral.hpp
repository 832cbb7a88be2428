#pragma once

#include <vector>

#include "gidm/kernel.hpp"

namespace gidm {

/// Per-frequency eigendecompositions of the symmetrically normalized blocks.
///
/// Per stored frequency: eigenvalues (descending, clipped into [0, 1]),
/// orthonormal eigenvectors v of S^(l) = D^{-1/2} W^(l) D^{-1/2} as columns,
/// and the random-walk eigenvectors vt = D^{-1/2} v of D^{-1} W^(l), which
/// share the eigenvalues. Eigenvector phases are arbitrary; every consumer
/// is phase-covariant.
struct SpectralData {
  ActionSpec action;
  Real eps = 0.0;
  int max_freq = 0;
  int quad_nodes = 0;
  bool implied_conjugates = false;
  std::vector<int> freqs;
  Vector degrees;
  std::vector<Vector> eigenvalues;
  std::vector<CMatrix> vectors_sym;   // v
  std::vector<CMatrix> vectors_walk;  // vt

  Index n_points() const { return degrees.size(); }
  int n_freqs() const { return static_cast<int>(freqs.size()); }
  Real freq_weight(int idx) const {
    return (implied_conjugates && freqs[static_cast<std::size_t>(idx)] != 0)
               ? 2.0
               : 1.0;
  }
  int index_of(int ell) const;
};

/// S^(l) = D^{-1/2} W^(l) D^{-1/2}, re-Hermitized on output.
std::vector<CMatrix> symmetric_normalize(const FourierBlocks& blocks);

/// Full Hermitian solve per frequency. Eigenvalues outside [0 - 1e-8, 1 + 1e-8]
/// indicate a broken kernel and raise; noise inside the window is clipped to
/// the interval.
SpectralData eigendecompose(const FourierBlocks& blocks);

/// Eigenfunction value conj(U^l(g)) vt_{n,l}(i) of the t-step walk operator
/// on the orbit grid (n is the 0-based rank within the stored frequency).
Complex eigenfunction_eval(const SpectralData& spec, int ell, int n, Index i,
                           const GroupElement& g);

struct ScreeEntry {
  int ell = 0;  // signed; implied negatives are expanded for SO(2)
  int n = 0;    // rank within the frequency, 0-based
  Real lambda = 0.0;
  Real lambda_pow_t = 0.0;
};

/// All (frequency, rank) eigenvalues raised to the t-th power, descending,
/// with implied negative frequencies expanded so multiplicities match the
/// full operator spectrum. Ties break on (ell, n).
std::vector<ScreeEntry> scree(const SpectralData& spec, int t);

/// Truncation threshold at the scree elbow: the value of the entry whose
/// discrete second difference is largest. Flat or tiny scree keeps all.
Real elbow_threshold(const std::vector<ScreeEntry>& entries);

/// One retained embedding coordinate (stored frequencies only).
struct RetainedCoord {
  int freq_idx = 0;
  int ell = 0;
  int n = 0;
  Real lambda = 0.0;
  Real lambda_pow_t = 0.0;
};

/// Coordinates with lambda^t > delta, ordered by descending lambda^t with
/// ties on (ell, n). Throws if nothing survives, naming the largest
/// available lambda^t.
std::vector<RetainedCoord> retained_set(const SpectralData& spec, int t,
                                        Real delta);

}  // namespace gidm
