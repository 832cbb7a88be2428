#include "gidm/dist.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gidm/parallel.hpp"

namespace gidm {

std::string distance_kind_name(DistanceKind k) {
  switch (k) {
    case DistanceKind::EquivariantWalk: return "equivariant-walk";
    case DistanceKind::EquivariantSym: return "equivariant-sym";
    case DistanceKind::Aligned: return "aligned";
    case DistanceKind::InvariantWalk: return "invariant-walk";
    case DistanceKind::InvariantSym: return "invariant-sym";
  }
  throw std::logic_error("unreachable");
}

DistanceKind distance_kind_from_name(const std::string& name) {
  for (DistanceKind k :
       {DistanceKind::EquivariantWalk, DistanceKind::EquivariantSym,
        DistanceKind::Aligned, DistanceKind::InvariantWalk,
        DistanceKind::InvariantSym}) {
    if (distance_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown distance kind: " + name);
}

DistanceReport equivariant_distance(const SpectralData& spec, Index i,
                                    const GroupElement& gi, Index j,
                                    const GroupElement& gj, int t, Real delta,
                                    bool walk) {
  EmbeddingVector a = equivariant_embed(spec, i, gi, t, delta, walk);
  EmbeddingVector b = equivariant_embed(spec, j, gj, t, delta, walk);
  DistanceReport rep;
  rep.kind = walk ? DistanceKind::EquivariantWalk : DistanceKind::EquivariantSym;
  rep.value = embedding_distance(a, b);
  rep.t1 = rep.t2 = t;
  rep.delta = delta;
  return rep;
}

namespace {

struct AlignmentProblem {
  Real base = 0.0;           // c0: sum of squared coordinate magnitudes
  std::vector<Complex> c;    // per stored frequency, zero where nothing kept
  const SpectralData* spec = nullptr;
  int max_ell = 0;
};

AlignmentProblem alignment_problem(const SpectralData& spec, Index i, Index j,
                                   int t, Real delta, bool walk) {
  AlignmentProblem prob;
  prob.spec = &spec;
  prob.max_ell = spec.max_freq;
  prob.c.assign(static_cast<std::size_t>(spec.n_freqs()), Complex(0.0));
  for (const auto& rc : retained_set(spec, t, delta)) {
    const CMatrix& vecs =
        walk ? spec.vectors_walk[static_cast<std::size_t>(rc.freq_idx)]
             : spec.vectors_sym[static_cast<std::size_t>(rc.freq_idx)];
    Real lam2t = rc.lambda_pow_t * rc.lambda_pow_t;
    Real wf = spec.freq_weight(rc.freq_idx);
    Complex vi = vecs(i, rc.n);
    Complex vj = vecs(j, rc.n);
    prob.base += wf * lam2t * (std::norm(vi) + std::norm(vj));
    prob.c[static_cast<std::size_t>(rc.freq_idx)] += lam2t * vi * std::conj(vj);
  }
  return prob;
}

// Squared objective |Phi(i, alpha) - Phi(j, id)|^2 from the frequency form.
Real objective_at(const AlignmentProblem& prob, Real alpha) {
  Complex sum = 0.0;
  for (int f = 0; f < prob.spec->n_freqs(); ++f) {
    int ell = prob.spec->freqs[static_cast<std::size_t>(f)];
    Complex term = std::conj(iur_scalar(ell, alpha)) *
                   prob.c[static_cast<std::size_t>(f)];
    if (prob.spec->freq_weight(f) == 2.0) {
      sum += 2.0 * std::real(term);
    } else {
      sum += term;
    }
  }
  return prob.base - 2.0 * std::real(sum);
}

}  // namespace

DistanceReport aligned_distance(const SpectralData& spec, Index i, Index j,
                                int t, Real delta, bool walk, int grid_size) {
  if (grid_size < 1) throw std::invalid_argument("aligned_distance: grid < 1");
  const bool cyclic_group = spec.action.group.id == GroupId::Cyclic;
  int grid = cyclic_group ? spec.action.group.order : grid_size;
  if (!cyclic_group && grid < 2 * spec.max_freq + 2) {
    throw std::invalid_argument(
        "aligned_distance: grid too coarse for the stored frequencies");
  }
  AlignmentProblem prob = alignment_problem(spec, i, j, t, delta, walk);

  // T[m] = sum over signed frequencies of c_ell e^{-i ell alpha_m}, as one
  // forward FFT of the frequency coefficients packed modulo the grid size.
  std::vector<Complex> packed(static_cast<std::size_t>(grid), Complex(0.0));
  for (int f = 0; f < spec.n_freqs(); ++f) {
    int ell = spec.freqs[static_cast<std::size_t>(f)];
    packed[static_cast<std::size_t>(ell % grid)] +=
        prob.c[static_cast<std::size_t>(f)];
    if (spec.freq_weight(f) == 2.0) {
      packed[static_cast<std::size_t>((grid - ell % grid) % grid)] +=
          std::conj(prob.c[static_cast<std::size_t>(f)]);
    }
  }
  Eigen::FFT<Real> fft;
  std::vector<Complex> transform;
  fft.fwd(transform, packed);

  int best = 0;
  Real best_obj = std::numeric_limits<Real>::infinity();
  for (int m = 0; m < grid; ++m) {
    Real obj = prob.base -
               2.0 * std::real(transform[static_cast<std::size_t>(m)]);
    if (obj < best_obj) {
      best_obj = obj;
      best = m;
    }
  }
  Real best_alpha = kTwoPi * best / grid;

  DistanceReport rep;
  rep.kind = DistanceKind::Aligned;
  rep.t1 = rep.t2 = t;
  rep.delta = delta;

  if (cyclic_group) {
    rep.value = std::sqrt(std::max<Real>(0.0, best_obj));
    rep.alignment = cyclic_element(spec.action.group.order, best);
    return rep;
  }

  // One parabolic refinement through the best node and its cyclic neighbors,
  // then an exact objective evaluation at the refined angle.
  Real fm = prob.base - 2.0 * std::real(transform[static_cast<std::size_t>(
                            (best + grid - 1) % grid)]);
  Real fp = prob.base - 2.0 * std::real(transform[static_cast<std::size_t>(
                            (best + 1) % grid)]);
  Real denom = fm - 2.0 * best_obj + fp;
  Real alpha = best_alpha;
  Real value_sq = best_obj;
  if (denom > 0.0) {
    Real shift = 0.5 * (fm - fp) / denom;  // in grid steps, |shift| <= 1/2
    Real refined = best_alpha + shift * (kTwoPi / grid);
    Real refined_obj = objective_at(prob, refined);
    if (refined_obj < value_sq) {
      value_sq = refined_obj;
      alpha = refined;
    }
  }
  rep.value = std::sqrt(std::max<Real>(0.0, value_sq));
  rep.alignment = so2_element(alpha);
  return rep;
}

DistanceReport invariant_distance(const EmbeddingVector& a,
                                  const EmbeddingVector& b) {
  if (a.kind != EmbeddingKind::InvariantWalk &&
      a.kind != EmbeddingKind::InvariantSym &&
      a.kind != EmbeddingKind::Bispectrum) {
    throw std::invalid_argument("invariant_distance: not an invariant kind");
  }
  DistanceReport rep;
  rep.kind = a.kind == EmbeddingKind::InvariantSym ? DistanceKind::InvariantSym
                                                   : DistanceKind::InvariantWalk;
  rep.value = embedding_distance(a, b);
  rep.t1 = a.t1;
  rep.t2 = a.t2;
  rep.delta = a.delta;
  return rep;
}

Matrix pairwise_matrix(const SpectralData& spec, DistanceKind kind, int t,
                       Real delta, int grid_size) {
  const Index n = spec.n_points();
  Matrix dist = Matrix::Zero(n, n);

  if (kind == DistanceKind::Aligned) {
    parallel_for(n, [&](Index i) {
      for (Index j = i + 1; j < n; ++j) {
        Real v = aligned_distance(spec, i, j, t, delta, true, grid_size).value;
        dist(i, j) = v;
        dist(j, i) = v;
      }
    }, 1);
    return dist;
  }

  // Coordinate matrix per point, then pairwise weighted norms.
  bool walk = kind == DistanceKind::EquivariantWalk ||
              kind == DistanceKind::InvariantWalk;
  bool invariant = kind == DistanceKind::InvariantWalk ||
                   kind == DistanceKind::InvariantSym;
  GroupElement id = identity(spec.action.group);
  auto embed_one = [&](Index i) {
    return invariant ? invariant_embed(spec, i, t, delta, walk)
                     : equivariant_embed(spec, i, id, t, delta, walk);
  };
  EmbeddingVector first = embed_one(0);
  const Index ncoords = first.size();
  CMatrix coords(n, ncoords);
  coords.row(0) = first.coords.transpose();
  Vector weights = first.weights;
  parallel_for(n - 1, [&](Index k) {
    coords.row(k + 1) = embed_one(k + 1).coords.transpose();
  }, 1);

  parallel_for(n, [&](Index i) {
    for (Index j = i + 1; j < n; ++j) {
      Real acc = 0.0;
      for (Index k = 0; k < ncoords; ++k) {
        acc += weights[k] * std::norm(coords(i, k) - coords(j, k));
      }
      Real v = std::sqrt(acc);
      dist(i, j) = v;
      dist(j, i) = v;
    }
  }, 1);
  return dist;
}

Real hs_inner(const SpectralData& spec, Index i, Index j, int t) {
  EmbeddingVector a = invariant_embed(spec, i, t, 0.0, false);
  EmbeddingVector b = invariant_embed(spec, j, t, 0.0, false);
  return std::real(embedding_inner(a, b));
}

}  // namespace gidm
