#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gidm/kernel.hpp"

namespace gidm {

/// Dense random walk on the discretized orbit set: N orbits times M grid
/// angles, node (i, a) at row i*M + a. Reference implementation only; the
/// production path never touches these matrices.
struct DenseWalk {
  ActionSpec action;
  Real eps = 0.0;
  int M = 0;
  Index N = 0;
  QuadratureRule quad;
  Matrix W;        // kernel values, symmetric, strictly positive
  Vector degrees;  // orbit degrees D_ii
  Matrix P;        // row stochastic
  Matrix S;        // symmetric normalization of W/M

  Index node(Index i, int a) const { return i * M + a; }

  const Matrix& p_power(int t);
  const Matrix& s_power(int t);

 private:
  std::map<int, Matrix> p_cache_;
  std::map<int, Matrix> s_cache_;
};

/// Builds the dense walk; refuses node counts beyond the guard.
DenseWalk build_dense(const PointCloud& cloud, Real eps, int quad_nodes,
                      Index max_nodes = 20000);

/// Weighted (walk) or plain (sym) L2 distance between the t-step transition
/// rows of two nodes, with the Haar weight folded in.
Real dense_diffusion_distance(DenseWalk& dense, Index i, int a, Index j, int b,
                              int t, bool walk);

struct CrossCorrelationResult {
  Real value = 0.0;   // norm of the tensor difference
  Real mass_i = 0.0;  // total tensor mass, 1 for the walk variant
  Real mass_j = 0.0;
};

/// Builds the displacement cross-correlation tensors of points i and j by
/// direct summation over the angle grid and returns the norm of their
/// difference: the walk variant (weighted=true) uses the probability rows
/// and 1/(D_kk D_rr) weights, the sym variant uses the symmetric kernel rows
/// unweighted. t2 < 0 means t2 = t.
CrossCorrelationResult dense_cross_correlation(DenseWalk& dense, Index i,
                                               Index j, int t, bool weighted,
                                               int t2 = -1);

/// Quadrature Hilbert-Schmidt norm of the tau-step symmetric kernel slice
/// (i, j): the double Haar integral of its squared values.
Real dense_hs_norm(DenseWalk& dense, Index i, Index j, int tau);

/// Orbit marginal of the t-step walk from (i, identity).
Vector dense_first_moment(DenseWalk& dense, Index i, int t);

/// Exact displacement distribution p(k, r, c):  the probability that two
/// independent t-step walks from (i, identity) end on orbits k and r with
/// displacement angle index c. Flattened as (k*N + r)*M + c.
std::vector<Real> exact_displacement_tensor(DenseWalk& dense, Index i, int t);

struct DisplacementHistogram {
  Index N = 0;
  int M = 0;
  int t = 0;
  long samples = 0;
  std::uint64_t seed = 0;
  std::vector<long> counts;  // same layout as the exact tensor
  std::vector<Real> prob;
};

/// Simulates paired independent t-step walks from (i, identity) and records
/// (orbit of walker 1, orbit of walker 2, displacement). Chunked so the
/// result is reproducible bit for bit for a fixed seed.
DisplacementHistogram mc_displacement(DenseWalk& dense, Index i, int t,
                                      long samples, std::uint64_t seed);

Real total_variation(const std::vector<Real>& p, const std::vector<Real>& q);

}  // namespace gidm
