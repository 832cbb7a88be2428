#include "gidm/kernel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gidm/parallel.hpp"
#include "gidm/rng.hpp"

namespace gidm {

void validate_cloud(const PointCloud& cloud, int quad_nodes,
                    Real fixed_point_tol) {
  if (cloud.size() < 1) throw std::invalid_argument("cloud is empty");
  if (!cloud.points.allFinite()) {
    throw std::domain_error("cloud contains non-finite coordinates");
  }
  QuadratureRule quad = haar_quadrature(
      cloud.action.group, cloud.action.group.id == GroupId::Cyclic
                              ? cloud.action.group.order
                              : quad_nodes);
  for (Index i = 0; i < cloud.size(); ++i) {
    Vector x = cloud.points.row(i);
    Real max_move = 0.0;
    for (const auto& g : quad.nodes) {
      max_move = std::max(max_move, (act(g, x, cloud.action) - x).norm());
    }
    if (max_move <= fixed_point_tol) {
      throw std::domain_error(
          "point " + std::to_string(i) +
          " is fixed by the group action (orbit diameter " +
          std::to_string(max_move) + "); remove it or change the action");
    }
  }
}

Vector orbit_kernel_samples(const Eigen::Ref<const Vector>& xi,
                            const Eigen::Ref<const Vector>& xj, Real eps,
                            const QuadratureRule& quad,
                            const ActionSpec& action) {
  if (!(eps > 0.0)) throw std::invalid_argument("kernel bandwidth must be > 0");
  const Index m = static_cast<Index>(quad.nodes.size());
  Vector w(m);
  for (Index k = 0; k < m; ++k) {
    Vector rotated = act(quad.nodes[static_cast<std::size_t>(k)], xj, action);
    w[k] = std::exp(-(xi - rotated).squaredNorm() / eps);
  }
  return w;
}

int FourierBlocks::index_of(int ell) const {
  for (int f = 0; f < n_freqs(); ++f) {
    if (freqs[static_cast<std::size_t>(f)] == ell) return f;
  }
  throw std::out_of_range("frequency not stored: " + std::to_string(ell));
}

FourierBlocks fourier_blocks(const PointCloud& cloud, Real eps, int max_freq,
                             int quad_nodes) {
  if (!(eps > 0.0)) throw std::invalid_argument("kernel bandwidth must be > 0");
  const bool is_cyclic = cloud.action.group.id == GroupId::Cyclic;
  if (is_cyclic) {
    int order = cloud.action.group.order;
    if (quad_nodes != order) {
      throw std::invalid_argument(
          "fourier_blocks: cyclic instance integrates over the group itself "
          "(quad_nodes must equal the order)");
    }
    max_freq = order - 1;  // full aliased frequency set
  } else {
    if (max_freq < 0) throw std::invalid_argument("max_freq must be >= 0");
    if (quad_nodes < 2 * max_freq + 2) {
      throw std::invalid_argument(
          "fourier_blocks: quadrature too coarse, need quad_nodes >= 2L+2");
    }
  }
  validate_cloud(cloud, quad_nodes);

  const Index n = cloud.size();
  const int m = quad_nodes;
  const int nf = max_freq + 1;

  FourierBlocks out;
  out.action = cloud.action;
  out.eps = eps;
  out.max_freq = max_freq;
  out.quad_nodes = m;
  out.implied_conjugates = !is_cyclic;
  out.freqs.resize(static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) out.freqs[static_cast<std::size_t>(f)] = f;
  out.blocks.assign(static_cast<std::size_t>(nf), CMatrix(n, n));

  QuadratureRule quad = haar_quadrature(cloud.action.group, m);

  // Per-node rotated copies of the whole cloud: rotated[k] row j = g_k . x_j.
  std::vector<Matrix> rotated(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    rotated[static_cast<std::size_t>(k)] =
        act_all(quad.nodes[static_cast<std::size_t>(k)], cloud.points,
                cloud.action);
  }

  // One pair per (i <= j); the mirrored entry is the conjugate since
  // W_ij(I, theta) = W_ji(I, -theta) and the kernel is real.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  parallel_for_chunks(static_cast<Index>(pairs.size()), [&](Index pb, Index pe) {
    Eigen::FFT<Real> fft;
    std::vector<Real> samples(static_cast<std::size_t>(m));
    std::vector<Complex> coeffs;
    for (Index p = pb; p < pe; ++p) {
      const auto [i, j] = pairs[static_cast<std::size_t>(p)];
      Vector xi = cloud.points.row(i);
      for (int k = 0; k < m; ++k) {
        samples[static_cast<std::size_t>(k)] =
            std::exp(-(xi.transpose() - rotated[static_cast<std::size_t>(k)].row(j))
                          .squaredNorm() /
                     eps);
      }
      fft.fwd(coeffs, samples);
      for (int f = 0; f < nf; ++f) {
        Complex c = coeffs[static_cast<std::size_t>(f)] / static_cast<Real>(m);
        out.blocks[static_cast<std::size_t>(f)](i, j) = c;
        out.blocks[static_cast<std::size_t>(f)](j, i) = std::conj(c);
      }
    }
  });

  out.degrees = out.blocks[0].real().rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    if (!(out.degrees[i] > 0.0)) {
      throw std::domain_error("non-positive degree at point " +
                              std::to_string(i));
    }
  }
  return out;
}

int effective_bandlimit(const FourierBlocks& blocks, Real energy_tol) {
  if (!(energy_tol > 0.0) || energy_tol > 1.0) {
    throw std::invalid_argument("energy_tol must lie in (0, 1]");
  }
  const int nf = blocks.n_freqs();
  const int order = blocks.action.group.order;
  // Energy per absolute frequency; cyclic labels above order/2 alias to
  // negative frequencies of small magnitude.
  std::map<int, Real> energy;
  Real total = 0.0;
  for (int f = 0; f < nf; ++f) {
    int ell = blocks.freqs[static_cast<std::size_t>(f)];
    int magnitude =
        blocks.implied_conjugates ? ell : std::min(ell, order - ell);
    Real e = blocks.freq_weight(f) *
             blocks.blocks[static_cast<std::size_t>(f)].squaredNorm();
    energy[magnitude] += e;
    total += e;
  }
  if (total <= 0.0) return 0;
  Real tail = total;
  for (const auto& [magnitude, e] : energy) {
    tail -= e;
    if (tail < energy_tol * total) return magnitude;
  }
  return energy.rbegin()->first;
}

Real median_bandwidth(const PointCloud& cloud, int quad_nodes,
                      std::uint64_t seed, int sample_pairs) {
  const Index n = cloud.size();
  if (n < 2) throw std::invalid_argument("median_bandwidth needs >= 2 points");
  if (sample_pairs < 1) throw std::invalid_argument("sample_pairs < 1");
  QuadratureRule quad = haar_quadrature(
      cloud.action.group, cloud.action.group.id == GroupId::Cyclic
                              ? cloud.action.group.order
                              : quad_nodes);
  const auto m = quad.nodes.size();
  RandomStream rng(seed);
  std::vector<Real> d2(static_cast<std::size_t>(sample_pairs));
  for (int s = 0; s < sample_pairs; ++s) {
    Index i = rng.uniform_index(n);
    Index j = rng.uniform_index(n - 1);
    if (j >= i) ++j;  // cross-orbit: distinct points
    const auto& g = quad.nodes[rng.uniform_index(static_cast<Index>(m))];
    Vector xj = act(g, cloud.points.row(j), cloud.action);
    d2[static_cast<std::size_t>(s)] =
        (cloud.points.row(i).transpose() - xj).squaredNorm();
  }
  auto mid = d2.begin() + d2.size() / 2;
  std::nth_element(d2.begin(), mid, d2.end());
  return *mid;
}

}  // namespace gidm
