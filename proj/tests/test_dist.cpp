#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gidm/data.hpp"
#include "gidm/dist.hpp"
#include "gidm/oracle.hpp"
#include "gidm/rng.hpp"

using namespace gidm;

namespace {

PointCloud cyclic_cloud(Index n, int order, std::uint64_t seed) {
  PointCloud cloud = sample_torus(n, 2.0, 1.0, seed);
  cloud.action.group = cyclic(order);
  return cloud;
}

SpectralData spectral_for(const PointCloud& cloud, Real eps, int max_freq,
                          int m) {
  return eigendecompose(fourier_blocks(cloud, eps, max_freq, m));
}

}  // namespace

TEST_CASE("equivariant distance: symmetry, zero, closed-form copy expansion") {
  PointCloud cloud = sample_torus(8, 2.0, 1.0, 7);
  const int m = 16;
  const Real beta = kTwoPi * 3 / m;
  PointCloud with_copy = inject_copy(cloud, 2, beta);
  SpectralData spec = spectral_for(with_copy, 2.0, 5, m);
  GroupElement id = identity(so2());
  const Index i = 2, j = with_copy.size() - 1;
  const int t = 2;

  CHECK(equivariant_distance(spec, i, id, i, id, t, 0.0, true).value == 0.0);
  Real dij = equivariant_distance(spec, i, id, j, id, t, 0.0, true).value;
  Real dji = equivariant_distance(spec, j, id, i, id, t, 0.0, true).value;
  CHECK(dij == doctest::Approx(dji).epsilon(1e-14));

  // per-coordinate expansion: sum of lambda^{2t} |1 - e^{-i ell beta}|^2 |vt|^2
  Real expected_sq = 0.0;
  for (const auto& rc : retained_set(spec, t, 0.0)) {
    Complex phase = std::exp(Complex(0.0, -rc.ell * beta));
    Complex vi = spec.vectors_walk[static_cast<std::size_t>(rc.freq_idx)](i, rc.n);
    expected_sq += spec.freq_weight(rc.freq_idx) * rc.lambda_pow_t *
                   rc.lambda_pow_t * std::norm((1.0 - phase) * vi);
  }
  CHECK(dij * dij == doctest::Approx(expected_sq).epsilon(1e-8));
}

TEST_CASE("equivariant distance equals the dense oracle on the cyclic group") {
  PointCloud cloud = cyclic_cloud(3, 4, 19);
  const Real eps = 2.0;
  SpectralData spec = spectral_for(cloud, eps, 3, 4);
  DenseWalk dense = build_dense(cloud, eps, 4);
  const int t = 2;
  for (bool walk : {true, false}) {
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) {
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            Real spectral = equivariant_distance(spec, i, cyclic_element(4, a),
                                                 j, cyclic_element(4, b), t,
                                                 0.0, walk)
                                .value;
            Real reference =
                dense_diffusion_distance(dense, i, a, j, b, t, walk);
            CHECK(std::abs(spectral - reference) < 1e-8);
          }
        }
      }
    }
  }
}

TEST_CASE("equivariance identity for doubly appended copies") {
  PointCloud cloud = cyclic_cloud(4, 8, 23);
  const Real a_angle = kTwoPi * 2 / 8, b_angle = kTwoPi * 5 / 8;
  PointCloud once = inject_copy(cloud, 0, a_angle);
  PointCloud twice = inject_copy(once, 1, b_angle);
  SpectralData spec = spectral_for(twice, 2.0, 7, 8);
  GroupElement id = identity(cyclic(8));
  const Index k = 4, r = 5;  // appended copies of 0 and 1
  const int t = 2;

  Real lhs = equivariant_distance(spec, k, id, r, id, t, 0.0, true).value;
  Real rhs = equivariant_distance(spec, 0, cyclic_element(8, 2), 1,
                                  cyclic_element(8, 5), t, 0.0, true)
                 .value;
  CHECK(std::abs(lhs - rhs) < 1e-8);
}

TEST_CASE("alignment: recovery, grid agreement, exactness on the group") {
  PointCloud cloud = cyclic_cloud(5, 8, 31);
  const int copy_node = 5;
  PointCloud with_copy = inject_copy(cloud, 1, kTwoPi * copy_node / 8);
  SpectralData spec = spectral_for(with_copy, 2.0, 7, 8);
  const Index i = 1, j = with_copy.size() - 1;
  const int t = 2;

  // self alignment: zero at the identity
  DistanceReport self = aligned_distance(spec, i, i, t, 0.0, true, 8);
  CHECK(self.value == doctest::Approx(0.0));
  CHECK(self.alignment->k == 0);

  // x_j = act(beta, x_i): recovered element is beta; the value sits at the
  // square-root cancellation floor of the frequency-form objective
  DistanceReport rep = aligned_distance(spec, i, j, t, 0.0, true, 8);
  CHECK(rep.alignment->k == copy_node);
  CHECK(rep.value < 1e-6);

  // grid objective equals the direct embedding evaluation at every element
  RandomStream rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    Index a = rng.uniform_index(5), b = rng.uniform_index(5);
    DistanceReport best = aligned_distance(spec, a, b, t, 0.0, true, 8);
    Real direct_min = std::numeric_limits<Real>::infinity();
    for (int c = 0; c < 8; ++c) {
      Real v = equivariant_distance(spec, a, cyclic_element(8, c), b,
                                    identity(cyclic(8)), t, 0.0, true)
                   .value;
      direct_min = std::min(direct_min, v);
      CHECK(best.value <= v + 1e-10);
    }
    CHECK(best.value == doctest::Approx(direct_min).epsilon(1e-10));
  }
}

TEST_CASE("so2 alignment recovers off-axis angles with refinement") {
  PointCloud cloud = sample_torus(9, 2.0, 1.0, 37);
  const int m = 32;
  const Real beta = kTwoPi * 7 / m;
  PointCloud with_copy = inject_copy(cloud, 3, beta);
  SpectralData spec = spectral_for(with_copy, 1.5, 6, m);
  const Index i = 3, j = with_copy.size() - 1;
  const int grid = 1024;

  DistanceReport rep = aligned_distance(spec, i, j, 2, 0.0, true, grid);
  Real da = std::abs(rep.alignment->angle - beta);
  da = std::min(da, kTwoPi - da);
  CHECK(da <= kPi / grid);  // half a grid step
  CHECK(rep.value < 1e-6);

  // doubly rotated pairs leave the aligned distance unchanged
  PointCloud doubly = inject_copy(
      inject_copy(with_copy, 0, kTwoPi * 11 / m), 5, kTwoPi * 19 / m);
  SpectralData spec2 = spectral_for(doubly, 1.5, 6, m);
  Real base = aligned_distance(spec2, 0, 5, 2, 0.0, true, grid).value;
  Real moved = aligned_distance(spec2, doubly.size() - 2, doubly.size() - 1, 2,
                                0.0, true, grid)
                   .value;
  CHECK(std::abs(base - moved) <= 1e-6 * std::max(1.0, base));

  // grid values match the direct per-angle computation
  for (int node : {0, 100, 511}) {
    Real angle = kTwoPi * node / grid;
    Real direct = equivariant_distance(spec, 0, so2_element(angle), 4,
                                       identity(so2()), 2, 0.0, true)
                      .value;
    DistanceReport best = aligned_distance(spec, 0, 4, 2, 0.0, true, grid);
    CHECK(best.value <= direct + 1e-10);
  }
}

TEST_CASE("invariant distances equal the dense cross-correlation oracle") {
  PointCloud cloud = cyclic_cloud(3, 4, 41);
  const Real eps = 2.5;
  SpectralData spec = spectral_for(cloud, eps, 3, 4);
  DenseWalk dense = build_dense(cloud, eps, 4);
  const int t = 2;

  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      Real walk_spec =
          invariant_distance(invariant_embed(spec, i, t, 0.0, true),
                             invariant_embed(spec, j, t, 0.0, true))
              .value;
      auto walk_dense = dense_cross_correlation(dense, i, j, t, true);
      CHECK(std::abs(walk_spec - walk_dense.value) < 1e-8);

      Real sym_spec =
          invariant_distance(invariant_embed(spec, i, t, 0.0, false),
                             invariant_embed(spec, j, t, 0.0, false))
              .value;
      auto sym_dense = dense_cross_correlation(dense, i, j, t, false);
      CHECK(std::abs(sym_spec - sym_dense.value) < 1e-8);

      // mixed times against the mixed oracle
      Real mixed_spec = embedding_distance(
          mixed_time_invariant_embed(spec, i, t, t + 1, 0.0),
          mixed_time_invariant_embed(spec, j, t, t + 1, 0.0));
      auto mixed_dense = dense_cross_correlation(dense, i, j, t, true, t + 1);
      CHECK(std::abs(mixed_spec - mixed_dense.value) < 1e-8);
    }
  }
}

TEST_CASE("hilbert-schmidt identity against the dense kernel") {
  PointCloud cloud = cyclic_cloud(3, 4, 47);
  const Real eps = 2.0;
  SpectralData spec = spectral_for(cloud, eps, 3, 4);
  DenseWalk dense = build_dense(cloud, eps, 4);

  for (int t : {1, 2}) {
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) {
        Real lhs = hs_inner(spec, i, j, t);
        Real rhs = dense_hs_norm(dense, i, j, 2 * t);
        CHECK(std::abs(lhs - rhs) < 1e-8);
      }
      CHECK(hs_inner(spec, i, i, t) >= 0.0);
    }
  }

  // the complex accumulation is real up to rounding
  Complex full = embedding_inner(invariant_embed(spec, 0, 2, 0.0, false),
                                 invariant_embed(spec, 1, 2, 0.0, false));
  CHECK(std::abs(full.imag()) < 1e-10 * std::max(1.0, std::abs(full.real())));
}

TEST_CASE("pairwise matrix: shape, metric axioms, orbit structure") {
  {
    PointCloud cloud;
    cloud.points.resize(1, 3);
    cloud.points << 1.0, 0.0, 0.0;
    cloud.action = ActionSpec{cyclic(2), 0, 1};
    SpectralData spec = spectral_for(cloud, 2.0, 1, 2);
    Matrix d = pairwise_matrix(spec, DistanceKind::InvariantWalk, 2, 0.0);
    REQUIRE(d.rows() == 1);
    CHECK(d(0, 0) == 0.0);
  }

  PointCloud cloud = sample_torus(24, 2.0, 1.0, 53);
  // an 8-point orbit injected at grid angles
  const int m = 16;
  for (int k = 1; k < 8; ++k) {
    cloud = inject_copy(cloud, 5, kTwoPi * static_cast<Real>(2 * k) / m);
  }
  SpectralData spec = spectral_for(cloud, 2.0, 5, m);
  Matrix d = pairwise_matrix(spec, DistanceKind::InvariantWalk, 2, 0.0);
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.minCoeff() >= 0.0);

  // triangle inequality (embedding-induced metric)
  RandomStream rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    Index a = rng.uniform_index(d.rows());
    Index b = rng.uniform_index(d.rows());
    Index c = rng.uniform_index(d.rows());
    CHECK(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
  }

  // the injected orbit is a single point of the invariant geometry
  std::vector<Index> orbit = {5, 24, 25, 26, 27, 28, 29, 30};
  Real within = 0.0;
  for (Index a : orbit) {
    for (Index b : orbit) within = std::max(within, d(a, b));
  }
  std::vector<Real> cross;
  for (Index a = 0; a < d.rows(); ++a) {
    for (Index b = a + 1; b < d.rows(); ++b) cross.push_back(d(a, b));
  }
  std::nth_element(cross.begin(), cross.begin() + cross.size() / 2,
                   cross.end());
  Real median = cross[cross.size() / 2];
  CHECK(within <= 1e-5 * median);
}

TEST_CASE("distances are gauge invariant under phases and degenerate mixing") {
  // Synthetic spectrum with a planted two-fold degeneracy.
  RandomStream rng(91);
  const Index n = 5;
  SpectralData spec;
  spec.action = ActionSpec{so2(), 0, 1};
  spec.implied_conjugates = true;
  spec.max_freq = 2;
  spec.freqs = {0, 1, 2};
  spec.degrees = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) spec.degrees[i] = 0.5 + rng.uniform();
  Vector inv_sqrt = spec.degrees.cwiseSqrt().cwiseInverse();
  for (int f = 0; f < 3; ++f) {
    CMatrix a(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) a(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
    Eigen::HouseholderQR<CMatrix> qr(a);
    CMatrix u = qr.householderQ();
    Vector lam(n);
    lam << 0.95, 0.7, 0.7, 0.4, 0.1;  // exact repeat inside the block
    if (f == 0) {
      lam[0] = 1.0;
    } else {
      lam *= 0.8;
    }
    spec.eigenvalues.push_back(lam);
    spec.vectors_sym.push_back(u);
    spec.vectors_walk.push_back(inv_sqrt.asDiagonal() * u);
  }

  auto all_distances = [&](const SpectralData& s) {
    std::vector<Real> out;
    GroupElement id = identity(so2());
    const int t = 2;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        out.push_back(
            equivariant_distance(s, i, id, j, so2_element(1.1), t, 0.0, true)
                .value);
        out.push_back(invariant_distance(invariant_embed(s, i, t, 0.0, true),
                                         invariant_embed(s, j, t, 0.0, true))
                          .value);
        out.push_back(invariant_distance(invariant_embed(s, i, t, 0.0, false),
                                         invariant_embed(s, j, t, 0.0, false))
                          .value);
        out.push_back(aligned_distance(s, i, j, t, 0.0, true, 64).value);
        out.push_back(hs_inner(s, i, j, t));
        out.push_back(embedding_distance(bispectrum_embed(s, i, t, 1e-3),
                                         bispectrum_embed(s, j, t, 1e-3)));
        out.push_back((first_moment(s, i, t) - first_moment(s, j, t)).norm());
      }
    }
    return out;
  };

  std::vector<Real> before = all_distances(spec);

  // gauge change: a random phase per eigenvector plus a random unitary mix of
  // the lambda = 0.7 pair in every block
  SpectralData mixed = spec;
  for (int f = 0; f < 3; ++f) {
    CMatrix gauge = CMatrix::Identity(n, n);
    for (Index k = 0; k < n; ++k) {
      Real phi = rng.uniform(0.0, kTwoPi);
      gauge(k, k) = Complex(std::cos(phi), std::sin(phi));
    }
    CMatrix rot(2, 2);
    Real a1 = rng.uniform(0.0, kTwoPi), a2 = rng.uniform(0.0, kTwoPi);
    Real c = std::cos(rng.uniform(0.0, kTwoPi) / 2), s = std::sqrt(1 - c * c);
    rot << Complex(std::cos(a1), std::sin(a1)) * c,
        Complex(std::cos(a2), std::sin(a2)) * s,
        -Complex(std::cos(a2), -std::sin(a2)) * s,
        Complex(std::cos(a1), -std::sin(a1)) * c;
    gauge.block(1, 1, 2, 2) = rot;  // acts on the degenerate pair
    mixed.vectors_sym[static_cast<std::size_t>(f)] =
        spec.vectors_sym[static_cast<std::size_t>(f)] * gauge;
    mixed.vectors_walk[static_cast<std::size_t>(f)] =
        inv_sqrt.asDiagonal() * mixed.vectors_sym[static_cast<std::size_t>(f)];
  }

  std::vector<Real> after = all_distances(mixed);
  REQUIRE(before.size() == after.size());
  for (std::size_t k = 0; k < before.size(); ++k) {
    CHECK(std::abs(before[k] - after[k]) <=
          1e-8 * std::max(1.0, std::abs(before[k])));
  }
}
