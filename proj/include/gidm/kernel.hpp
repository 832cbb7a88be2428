#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gidm/group.hpp"
#include "gidm/types.hpp"

namespace gidm {

struct InjectedCopy {
  Index source = 0;
  Real angle = 0.0;  // canonical [0, 2pi)
};

/// N ambient points (one per row) plus the action that closes their orbits.
/// metadata carries the generating recipe verbatim (shape, radii, sampling
/// variant, ...) and round-trips through the sidecar untouched.
struct PointCloud {
  Matrix points;  // N x n
  ActionSpec action;
  std::string source_label;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<InjectedCopy> injected;

  Index size() const { return points.rows(); }
  Index ambient_dim() const { return points.cols(); }
};

/// Rejects clouds violating the standing assumptions: finite coordinates and
/// no point fixed by the whole orbit grid (fixed points make the orbit kernel
/// degenerate). Throws std::domain_error naming the offending index.
void validate_cloud(const PointCloud& cloud, int quad_nodes,
                    Real fixed_point_tol = 1e-9);

/// Gaussian orbit-kernel samples w(k) = exp(-|x_i - g_k . x_j|^2 / eps) over
/// the quadrature nodes g_k.
Vector orbit_kernel_samples(const Eigen::Ref<const Vector>& xi,
                            const Eigen::Ref<const Vector>& xj, Real eps,
                            const QuadratureRule& quad,
                            const ActionSpec& action);

/// The per-frequency Fourier coefficient blocks of the orbit kernel, plus the
/// degree vector accumulated from the zero-frequency block.
///
/// Stored frequencies are 0..max_freq for SO(2) with the negative half implied
/// by conjugation (the kernel is real), and the full aliased set 0..order-1
/// for the cyclic instance, where the coefficients are the exact DFT.
struct FourierBlocks {
  ActionSpec action;
  Real eps = 0.0;
  int max_freq = 0;    // L for SO(2); order-1 for cyclic
  int quad_nodes = 0;  // M
  bool implied_conjugates = false;
  std::vector<int> freqs;
  std::vector<CMatrix> blocks;  // N x N per stored frequency
  Vector degrees;               // length N, strictly positive

  Index n_points() const { return degrees.size(); }
  int n_freqs() const { return static_cast<int>(freqs.size()); }
  /// Multiplicity of a stored frequency in norms over the full frequency set.
  Real freq_weight(int idx) const {
    return (implied_conjugates && freqs[static_cast<std::size_t>(idx)] != 0)
               ? 2.0
               : 1.0;
  }
  int index_of(int ell) const;
};

FourierBlocks fourier_blocks(const PointCloud& cloud, Real eps, int max_freq,
                             int quad_nodes);

/// Smallest L_eff whose excluded tail carries less than energy_tol of the
/// total block energy (Frobenius, counting implied conjugates).
int effective_bandlimit(const FourierBlocks& blocks, Real energy_tol);

/// Median squared distance between randomly drawn cross-orbit point pairs;
/// the default kernel bandwidth.
Real median_bandwidth(const PointCloud& cloud, int quad_nodes,
                      std::uint64_t seed, int sample_pairs = 1000);

}  // namespace gidm
