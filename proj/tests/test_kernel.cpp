#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "gidm/data.hpp"
#include "gidm/kernel.hpp"

using namespace gidm;

namespace {

// Independent quadrature oracle for one Fourier coefficient.
Complex naive_coeff(const Eigen::Ref<const Vector>& samples, int ell) {
  const Index m = samples.size();
  Complex acc = 0.0;
  for (Index k = 0; k < m; ++k) {
    Real phase = -kTwoPi * ell * static_cast<Real>(k) / static_cast<Real>(m);
    acc += samples[k] * Complex(std::cos(phase), std::sin(phase));
  }
  return acc / static_cast<Real>(m);
}

PointCloud tiny_cloud(std::initializer_list<std::initializer_list<Real>> rows,
                      ActionSpec action) {
  PointCloud cloud;
  cloud.points.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (Real v : row) cloud.points(i, c++) = v;
    ++i;
  }
  cloud.action = action;
  return cloud;
}

}  // namespace

TEST_CASE("orbit kernel samples match analytic values") {
  ActionSpec action{so2(), 0, 1};
  QuadratureRule quad = haar_quadrature(so2(), 4);
  Vector x(3), y(3);
  x << 1.0, 0.0, 0.0;

  // same point, half turn: |x - R(pi) x|^2 = 4, eps = 2
  Vector w = orbit_kernel_samples(x, x, 2.0, quad, action);
  CHECK(w[0] == doctest::Approx(1.0));  // zero distance at the identity
  CHECK(w[2] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

  // cross pair: x=(1,0,0), y=(0,1,0), theta=pi/2 sends y to (-1,0,0)
  y << 0.0, 1.0, 0.0;
  Vector v = orbit_kernel_samples(x, y, 1.0, quad, action);
  CHECK(v[1] == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  for (Index k = 0; k < v.size(); ++k) {
    CHECK(v[k] > 0.0);
    CHECK(v[k] <= 1.0);
  }
  CHECK_THROWS_AS(orbit_kernel_samples(x, y, 0.0, quad, action),
                  std::invalid_argument);
}

TEST_CASE("zero-frequency coefficient matches the Bessel identity") {
  // For x_i = x_j = (1,0,0), eps=2: W(theta) = exp(-(2-2cos theta)/2), whose
  // Haar mean is e^{-1} I_0(1). Oracle: 4096-node quadrature, frozen here.
  ActionSpec action{so2(), 0, 1};
  QuadratureRule quad = haar_quadrature(so2(), 4096);
  Vector x(3);
  x << 1.0, 0.0, 0.0;
  Vector samples = orbit_kernel_samples(x, x, 2.0, quad, action);
  Complex oracle = naive_coeff(samples, 0);
  const Real bessel = 0.4657596075936404;  // e^{-1} I_0(1)
  CHECK(std::abs(oracle.real() - bessel) < 1e-12);
  CHECK(std::abs(oracle.imag()) < 1e-15);

  // the production path at modest M agrees (the integrand is bandlimited to
  // machine precision well below M)
  PointCloud cloud = tiny_cloud({{1.0, 0.0, 0.0}, {0.0, 2.0, 0.5}}, action);
  FourierBlocks blocks = fourier_blocks(cloud, 2.0, 8, 64);
  CHECK(std::abs(blocks.blocks[0](0, 0).real() - bessel) < 1e-12);
}

TEST_CASE("cyclic two-point example has the stated DFT") {
  ActionSpec action{cyclic(2), 0, 1};
  PointCloud cloud = tiny_cloud({{1.0, 0.0}, {0.0, 1.0}}, action);
  FourierBlocks blocks = fourier_blocks(cloud, 1.0, 1, 2);
  // both samples equal e^{-2}: mean e^{-2}, difference coefficient 0
  CHECK(blocks.blocks[0](0, 1).real() ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(std::abs(blocks.blocks[1](0, 1)) < 1e-16);
}

TEST_CASE("blocks are Hermitian and conjugate across frequency") {
  PointCloud cloud = sample_torus(12, 2.0, 1.0, 31);
  const int m = 16, L = 5;
  FourierBlocks blocks = fourier_blocks(cloud, 3.0, L, m);
  QuadratureRule quad = haar_quadrature(so2(), m);

  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index j = 0; j < cloud.size(); ++j) {
      Vector sij = orbit_kernel_samples(cloud.points.row(i),
                                        cloud.points.row(j), 3.0, quad,
                                        cloud.action);
      for (int ell = 0; ell <= L; ++ell) {
        Complex cij = naive_coeff(sij, ell);
        // Hermitian: the (j,i) entry computed from its own samples is the
        // conjugate of (i,j)
        CHECK(std::abs(blocks.blocks[static_cast<std::size_t>(ell)](j, i) -
                       std::conj(cij)) < 1e-10);
        // real kernel: the negative frequency is the conjugate
        CHECK(std::abs(naive_coeff(sij, -ell) - std::conj(cij)) < 1e-12);
        CHECK(std::abs(blocks.blocks[static_cast<std::size_t>(ell)](i, j) - cij) <
              1e-12);
      }
    }
  }
}

TEST_CASE("cyclic instance is the exact DFT, reproducibly") {
  PointCloud cloud = sample_torus(6, 2.0, 1.0, 8);
  cloud.action.group = cyclic(8);
  FourierBlocks a = fourier_blocks(cloud, 2.5, 7, 8);
  FourierBlocks b = fourier_blocks(cloud, 2.5, 7, 8);
  REQUIRE(a.n_freqs() == 8);
  CHECK_FALSE(a.implied_conjugates);

  QuadratureRule quad = haar_quadrature(cyclic(8), 8);
  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index j = 0; j < cloud.size(); ++j) {
      Vector s = orbit_kernel_samples(cloud.points.row(i), cloud.points.row(j),
                                      2.5, quad, cloud.action);
      for (int ell = 0; ell < 8; ++ell) {
        CHECK(std::abs(a.blocks[static_cast<std::size_t>(ell)](i, j) -
                       naive_coeff(s, ell)) < 1e-14);
      }
      // byte-identical rerun
      for (int ell = 0; ell < 8; ++ell) {
        Complex va = a.blocks[static_cast<std::size_t>(ell)](i, j);
        Complex vb = b.blocks[static_cast<std::size_t>(ell)](i, j);
        CHECK(std::memcmp(&va, &vb, sizeof(Complex)) == 0);
      }
    }
  }
}

TEST_CASE("parseval over the full cyclic frequency set") {
  PointCloud cloud = sample_torus(5, 2.0, 1.0, 17);
  cloud.action.group = cyclic(12);
  FourierBlocks blocks = fourier_blocks(cloud, 1.5, 11, 12);
  QuadratureRule quad = haar_quadrature(cyclic(12), 12);
  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index j = 0; j < cloud.size(); ++j) {
      Vector s = orbit_kernel_samples(cloud.points.row(i), cloud.points.row(j),
                                      1.5, quad, cloud.action);
      Real coeff_energy = 0.0;
      for (int ell = 0; ell < 12; ++ell) {
        coeff_energy += std::norm(blocks.blocks[static_cast<std::size_t>(ell)](i, j));
      }
      Real sample_energy = s.squaredNorm() / 12.0;
      CHECK(std::abs(coeff_energy - sample_energy) < 1e-10);
    }
  }
}

TEST_CASE("degrees are positive and match the zero block") {
  PointCloud cloud = sample_torus(9, 2.0, 1.0, 21);
  FourierBlocks blocks = fourier_blocks(cloud, 4.0, 4, 16);
  for (Index i = 0; i < cloud.size(); ++i) {
    CHECK(blocks.degrees[i] > 0.0);
    CHECK(blocks.degrees[i] ==
          doctest::Approx(blocks.blocks[0].row(i).sum().real()).epsilon(1e-14));
  }
}

TEST_CASE("high frequencies vanish for wide kernels") {
  // eps much larger than the orbit diameter: the sampled kernel is nearly
  // constant in the angle, so every ell > 0 coefficient collapses.
  PointCloud cloud = sample_torus(6, 2.0, 1.0, 13);
  FourierBlocks blocks = fourier_blocks(cloud, 4000.0, 10, 32);
  for (int ell = 4; ell <= 10; ++ell) {
    CHECK(blocks.blocks[static_cast<std::size_t>(ell)].cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("effective bandlimit edge cases and grid refinement") {
  PointCloud cloud = sample_torus(64, 2.0, 1.0, 77);
  Real eps = median_bandwidth(cloud, 32, 4);
  FourierBlocks coarse = fourier_blocks(cloud, eps, 10, 32);
  FourierBlocks fine = fourier_blocks(cloud, eps, 10, 64);
  for (Real tol : {1e-4, 1e-6, 1e-8}) {
    CHECK(effective_bandlimit(coarse, tol) == effective_bandlimit(fine, tol));
  }
  CHECK(effective_bandlimit(coarse, 1.0) == 0);

  // only the zero block nonzero
  FourierBlocks lone = coarse;
  for (std::size_t f = 1; f < lone.blocks.size(); ++f) lone.blocks[f].setZero();
  CHECK(effective_bandlimit(lone, 1e-9) == 0);
  CHECK_THROWS_AS(effective_bandlimit(coarse, 0.0), std::invalid_argument);

  // cyclic labels alias: the same grid seen as C_32 gives the same bandlimit
  PointCloud as_cyclic = cloud;
  as_cyclic.action.group = cyclic(32);
  FourierBlocks aliased = fourier_blocks(as_cyclic, eps, 31, 32);
  for (Real tol : {1e-4, 1e-6}) {
    CHECK(effective_bandlimit(aliased, tol) ==
          effective_bandlimit(fourier_blocks(cloud, eps, 15, 32), tol));
  }
}

TEST_CASE("fixed points of the action are rejected") {
  ActionSpec action{so2(), 0, 1};
  PointCloud cloud = tiny_cloud({{1.0, 0.0, 0.0}, {0.0, 0.0, 3.0}}, action);
  CHECK_THROWS_AS(fourier_blocks(cloud, 1.0, 2, 8), std::domain_error);
  CHECK_THROWS_AS(validate_cloud(cloud, 8), std::domain_error);
}

TEST_CASE("quadrature margin is enforced") {
  PointCloud cloud = sample_torus(4, 2.0, 1.0, 2);
  CHECK_THROWS_AS(fourier_blocks(cloud, 1.0, 8, 16), std::invalid_argument);
  CHECK_NOTHROW(fourier_blocks(cloud, 1.0, 7, 16));
}

TEST_CASE("median bandwidth is deterministic and positive") {
  PointCloud cloud = sample_torus(40, 2.0, 1.0, 19);
  Real a = median_bandwidth(cloud, 16, 99);
  Real b = median_bandwidth(cloud, 16, 99);
  CHECK(a == b);
  CHECK(a > 0.0);
}
