#include "gidm/oracle.hpp"

#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

#include "gidm/parallel.hpp"
#include "gidm/rng.hpp"

namespace gidm {

const Matrix& DenseWalk::p_power(int t) {
  if (t < 0) throw std::invalid_argument("p_power: t < 0");
  auto it = p_cache_.find(t);
  if (it != p_cache_.end()) return it->second;
  Matrix value;
  if (t == 0) {
    value = Matrix::Identity(P.rows(), P.cols());
  } else {
    value = p_power(t - 1) * P;
  }
  return p_cache_.emplace(t, std::move(value)).first->second;
}

const Matrix& DenseWalk::s_power(int t) {
  if (t < 0) throw std::invalid_argument("s_power: t < 0");
  auto it = s_cache_.find(t);
  if (it != s_cache_.end()) return it->second;
  Matrix value;
  if (t == 0) {
    value = Matrix::Identity(S.rows(), S.cols());
  } else {
    value = s_power(t - 1) * S;
  }
  return s_cache_.emplace(t, std::move(value)).first->second;
}

DenseWalk build_dense(const PointCloud& cloud, Real eps, int quad_nodes,
                      Index max_nodes) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_dense: eps <= 0");
  const bool is_cyclic = cloud.action.group.id == GroupId::Cyclic;
  int m = is_cyclic ? cloud.action.group.order : quad_nodes;
  if (is_cyclic && quad_nodes != m) {
    throw std::invalid_argument(
        "build_dense: cyclic instance uses the group as its grid");
  }
  const Index n = cloud.size();
  if (n * m > max_nodes) {
    throw GuardViolation("dense walk would need " + std::to_string(n * m) +
                         " nodes, guard is " + std::to_string(max_nodes));
  }
  validate_cloud(cloud, m);

  DenseWalk dense;
  dense.action = cloud.action;
  dense.eps = eps;
  dense.M = m;
  dense.N = n;
  dense.quad = haar_quadrature(cloud.action.group, m);

  // All grid points: row node(i, a) holds theta_a . x_i.
  Matrix grid_points(n * m, cloud.ambient_dim());
  for (int a = 0; a < m; ++a) {
    Matrix rotated = act_all(dense.quad.nodes[static_cast<std::size_t>(a)],
                             cloud.points, cloud.action);
    for (Index i = 0; i < n; ++i) grid_points.row(i * m + a) = rotated.row(i);
  }

  const Index nodes = n * m;
  dense.W.resize(nodes, nodes);
  for (Index u = 0; u < nodes; ++u) {
    dense.W(u, u) = 1.0;
    for (Index v = u + 1; v < nodes; ++v) {
      Real w = std::exp(
          -(grid_points.row(u) - grid_points.row(v)).squaredNorm() / eps);
      dense.W(u, v) = w;
      dense.W(v, u) = w;
    }
  }

  // Orbit degrees from the identity node of each orbit; rows inside one orbit
  // agree up to rounding.
  dense.degrees.resize(n);
  for (Index i = 0; i < n; ++i) {
    dense.degrees[i] = dense.W.row(dense.node(i, 0)).sum() / m;
  }

  dense.P.resize(nodes, nodes);
  dense.S.resize(nodes, nodes);
  for (Index i = 0; i < n; ++i) {
    for (int a = 0; a < m; ++a) {
      Index u = dense.node(i, a);
      dense.P.row(u) = dense.W.row(u) / (m * dense.degrees[i]);
      for (Index j = 0; j < n; ++j) {
        for (int b = 0; b < m; ++b) {
          Index v = dense.node(j, b);
          dense.S(u, v) = dense.W(u, v) /
                          (m * std::sqrt(dense.degrees[i] * dense.degrees[j]));
        }
      }
    }
  }
  return dense;
}

Real dense_diffusion_distance(DenseWalk& dense, Index i, int a, Index j, int b,
                              int t, bool walk) {
  const Matrix& power = walk ? dense.p_power(t) : dense.s_power(t);
  auto row_i = power.row(dense.node(i, a));
  auto row_j = power.row(dense.node(j, b));
  Real acc = 0.0;
  for (Index k = 0; k < dense.N; ++k) {
    Real wk = walk ? 1.0 / dense.degrees[k] : 1.0;
    for (int c = 0; c < dense.M; ++c) {
      Index v = dense.node(k, c);
      Real d = row_i(v) - row_j(v);
      acc += wk * d * d;
    }
  }
  return std::sqrt(dense.M * acc);
}

namespace {

// Kernel-valued transition rows from (x, identity): g_k(a) = M * power row.
Matrix kernel_rows(DenseWalk& dense, Index x, int t, bool walk) {
  const Matrix& power = walk ? dense.p_power(t) : dense.s_power(t);
  Matrix g(dense.N, dense.M);
  auto row = power.row(dense.node(x, 0));
  for (Index k = 0; k < dense.N; ++k) {
    for (int a = 0; a < dense.M; ++a) {
      g(k, a) = dense.M * row(dense.node(k, a));
    }
  }
  return g;
}

// Cross-correlation tensor T(k, r, c) = int g1_k(q) g2_r(q c) d_eta(q).
std::vector<Real> correlation_tensor(const Matrix& g1, const Matrix& g2,
                                     int m) {
  const Index n = g1.rows();
  std::vector<Real> tensor(static_cast<std::size_t>(n * n * m), 0.0);
  for (Index k = 0; k < n; ++k) {
    for (Index r = 0; r < n; ++r) {
      for (int c = 0; c < m; ++c) {
        Real acc = 0.0;
        for (int q = 0; q < m; ++q) {
          acc += g1(k, q) * g2(r, (q + c) % m);
        }
        tensor[static_cast<std::size_t>((k * n + r) * m + c)] = acc / m;
      }
    }
  }
  return tensor;
}

Real tensor_mass(const std::vector<Real>& tensor, Index n, int m) {
  Real acc = 0.0;
  for (Real v : tensor) acc += v;
  return acc / m;  // Haar weight of the displacement integral
}

}  // namespace

CrossCorrelationResult dense_cross_correlation(DenseWalk& dense, Index i,
                                               Index j, int t, bool weighted,
                                               int t2) {
  if (t2 < 0) t2 = t;
  Matrix gi1 = kernel_rows(dense, i, t, weighted);
  Matrix gi2 = t2 == t ? gi1 : kernel_rows(dense, i, t2, weighted);
  Matrix gj1 = kernel_rows(dense, j, t, weighted);
  Matrix gj2 = t2 == t ? gj1 : kernel_rows(dense, j, t2, weighted);
  std::vector<Real> ti = correlation_tensor(gi1, gi2, dense.M);
  std::vector<Real> tj = correlation_tensor(gj1, gj2, dense.M);

  CrossCorrelationResult res;
  res.mass_i = tensor_mass(ti, dense.N, dense.M);
  res.mass_j = tensor_mass(tj, dense.N, dense.M);
  Real acc = 0.0;
  for (Index k = 0; k < dense.N; ++k) {
    for (Index r = 0; r < dense.N; ++r) {
      Real u = weighted ? 1.0 / (dense.degrees[k] * dense.degrees[r]) : 1.0;
      for (int c = 0; c < dense.M; ++c) {
        Real d = ti[static_cast<std::size_t>((k * dense.N + r) * dense.M + c)] -
                 tj[static_cast<std::size_t>((k * dense.N + r) * dense.M + c)];
        acc += u * d * d / dense.M;
      }
    }
  }
  res.value = std::sqrt(acc);
  return res;
}

Real dense_hs_norm(DenseWalk& dense, Index i, Index j, int tau) {
  const Matrix& power = dense.s_power(tau);
  Real acc = 0.0;
  for (int a = 0; a < dense.M; ++a) {
    for (int b = 0; b < dense.M; ++b) {
      Real kernel = dense.M * power(dense.node(i, a), dense.node(j, b));
      acc += kernel * kernel;
    }
  }
  return acc / (static_cast<Real>(dense.M) * dense.M);
}

Vector dense_first_moment(DenseWalk& dense, Index i, int t) {
  const Matrix& power = dense.p_power(t);
  auto row = power.row(dense.node(i, 0));
  Vector m = Vector::Zero(dense.N);
  for (Index k = 0; k < dense.N; ++k) {
    for (int a = 0; a < dense.M; ++a) m[k] += row(dense.node(k, a));
  }
  return m;
}

std::vector<Real> exact_displacement_tensor(DenseWalk& dense, Index i, int t) {
  const Matrix& power = dense.p_power(t);
  auto row = power.row(dense.node(i, 0));
  std::vector<Real> p(static_cast<std::size_t>(dense.N * dense.N * dense.M),
                      0.0);
  for (Index k = 0; k < dense.N; ++k) {
    for (Index r = 0; r < dense.N; ++r) {
      for (int c = 0; c < dense.M; ++c) {
        Real acc = 0.0;
        for (int a = 0; a < dense.M; ++a) {
          acc += row(dense.node(k, a)) * row(dense.node(r, (a + c) % dense.M));
        }
        p[static_cast<std::size_t>((k * dense.N + r) * dense.M + c)] = acc;
      }
    }
  }
  return p;
}

DisplacementHistogram mc_displacement(DenseWalk& dense, Index i, int t,
                                      long samples, std::uint64_t seed) {
  if (samples < 10000) {
    throw std::invalid_argument(
        "mc_displacement: need at least 10^4 samples for a usable histogram");
  }
  const Index nodes = dense.N * dense.M;

  // Cumulative transition rows for inverse-CDF sampling; row-major so each
  // row is contiguous for the binary search.
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      cumulative(nodes, nodes);
  for (Index u = 0; u < nodes; ++u) {
    Real acc = 0.0;
    for (Index v = 0; v < nodes; ++v) {
      acc += dense.P(u, v);
      cumulative(u, v) = acc;
    }
    cumulative(u, nodes - 1) = 1.0;
  }
  auto step = [&](Index u, Real uniform) {
    const Real* row = cumulative.data() + u * nodes;
    return static_cast<Index>(
        std::lower_bound(row, row + nodes, uniform) - row);
  };

  DisplacementHistogram hist;
  hist.N = dense.N;
  hist.M = dense.M;
  hist.t = t;
  hist.samples = samples;
  hist.seed = seed;
  hist.counts.assign(static_cast<std::size_t>(dense.N * dense.N * dense.M), 0);

  // Fixed-size chunks with per-chunk substreams: the merged counts do not
  // depend on scheduling, so runs reproduce bit for bit.
  const long chunk_size = 65536;
  const long chunks = (samples + chunk_size - 1) / chunk_size;
  std::vector<std::vector<long>> partial(
      static_cast<std::size_t>(chunks),
      std::vector<long>(hist.counts.size(), 0));
  parallel_for(static_cast<Index>(chunks), [&](Index c) {
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(c));
    long begin = c * chunk_size;
    long end = std::min(samples, begin + chunk_size);
    auto& counts = partial[static_cast<std::size_t>(c)];
    const Index start = dense.node(i, 0);
    for (long s = begin; s < end; ++s) {
      Index u = start, v = start;
      for (int step_idx = 0; step_idx < t; ++step_idx) u = step(u, rng.uniform());
      for (int step_idx = 0; step_idx < t; ++step_idx) v = step(v, rng.uniform());
      Index k = u / dense.M, r = v / dense.M;
      int a = static_cast<int>(u % dense.M), b = static_cast<int>(v % dense.M);
      int disp = (b - a + dense.M) % dense.M;
      ++counts[static_cast<std::size_t>((k * dense.N + r) * dense.M + disp)];
    }
  }, 1);
  for (const auto& counts : partial) {
    for (std::size_t q = 0; q < counts.size(); ++q) hist.counts[q] += counts[q];
  }
  hist.prob.resize(hist.counts.size());
  for (std::size_t q = 0; q < hist.counts.size(); ++q) {
    hist.prob[q] = static_cast<Real>(hist.counts[q]) / static_cast<Real>(samples);
  }
  return hist;
}

Real total_variation(const std::vector<Real>& p, const std::vector<Real>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("total_variation: size mismatch");
  }
  Real acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += std::abs(p[k] - q[k]);
  return acc / 2.0;
}

}  // namespace gidm
