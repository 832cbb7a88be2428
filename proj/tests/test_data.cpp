#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gidm/data.hpp"

using namespace gidm;

TEST_CASE("torus parametrization hits the stated points") {
  Vector p = torus_point(0.0, 0.0, 2.0, 1.0);
  CHECK(p[0] == doctest::Approx(3.0));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.0);
  // tube angle pi/2 lifts to z = r
  CHECK(torus_point(0.0, kPi / 2, 2.0, 1.0)[2] == doctest::Approx(1.0));
}

TEST_CASE("torus samples satisfy the implicit equation") {
  for (bool area : {false, true}) {
    PointCloud cloud = sample_torus(500, 2.0, 1.0, 42, area);
    for (Index i = 0; i < cloud.size(); ++i) {
      Real x = cloud.points(i, 0), y = cloud.points(i, 1),
           z = cloud.points(i, 2);
      Real ring = std::sqrt(x * x + y * y) - 2.0;
      CHECK(std::abs(ring * ring + z * z - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("sphere samples are unit and z is uniform") {
  PointCloud cloud = sample_sphere(10000, 7);
  Vector mean = Vector::Zero(3);
  for (Index i = 0; i < cloud.size(); ++i) {
    CHECK(std::abs(cloud.points.row(i).norm() - 1.0) < 1e-12);
    mean += cloud.points.row(i).transpose();
  }
  mean /= static_cast<Real>(cloud.size());
  CHECK(mean.norm() < 0.02);

  // Archimedes: z-coordinates are uniform on [-1, 1]; Kolmogorov-Smirnov
  // statistic below the 1% critical value 1.628/sqrt(n).
  std::vector<Real> z(static_cast<std::size_t>(cloud.size()));
  for (Index i = 0; i < cloud.size(); ++i) z[static_cast<std::size_t>(i)] = cloud.points(i, 2);
  std::sort(z.begin(), z.end());
  Real ks = 0.0;
  const Real n = static_cast<Real>(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    Real cdf = (z[k] + 1.0) / 2.0;
    ks = std::max(ks, std::abs(cdf - static_cast<Real>(k) / n));
    ks = std::max(ks, std::abs(static_cast<Real>(k + 1) / n - cdf));
  }
  CHECK(ks < 1.628 / std::sqrt(n));
}

TEST_CASE("sampling is deterministic in the seed") {
  PointCloud a = sample_torus(64, 2.0, 1.0, 123);
  PointCloud b = sample_torus(64, 2.0, 1.0, 123);
  PointCloud c = sample_torus(64, 2.0, 1.0, 124);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("orbit closure keeps samples on the surface") {
  PointCloud torus = sample_torus(50, 2.0, 1.0, 9);
  for (Real angle : {0.3, 1.7, 4.4}) {
    Matrix rotated = act_all(so2_element(angle), torus.points, torus.action);
    for (Index i = 0; i < rotated.rows(); ++i) {
      Real x = rotated(i, 0), y = rotated(i, 1), z = rotated(i, 2);
      Real ring = std::sqrt(x * x + y * y) - 2.0;
      CHECK(std::abs(ring * ring + z * z - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("inject_copy appends the rotated point and records it") {
  PointCloud cloud = sample_torus(10, 2.0, 1.0, 1);
  cloud.points.row(0) = torus_point(0.0, 0.0, 2.0, 1.0).transpose();  // (3,0,0)
  PointCloud with_copy = inject_copy(cloud, 0, kPi);
  REQUIRE(with_copy.size() == 11);
  CHECK(with_copy.points(10, 0) == doctest::Approx(-3.0));
  CHECK(std::abs(with_copy.points(10, 1)) < 1e-12);
  REQUIRE(with_copy.injected.size() == 1);
  CHECK(with_copy.injected[0].source == 0);
  CHECK(with_copy.injected[0].angle == doctest::Approx(kPi));

  // 60 degree copy evaluated directly
  PointCloud sixty = inject_copy(cloud, 0, kPi / 3);
  Vector expected = act(so2_element(kPi / 3), cloud.points.row(0), cloud.action);
  CHECK((sixty.points.row(10).transpose() - expected).norm() < 1e-14);

  CHECK_THROWS_AS(inject_copy(cloud, 99, 0.1), std::out_of_range);
}

TEST_CASE("area-uniform torus sampling shifts tube mass outward") {
  // Outer half |tube| < pi/2 has probability (pi R + 2r)/(2 pi R) ~ 0.66 under
  // the area density vs 0.5 under parameter sampling.
  auto outer_fraction = [](const PointCloud& cloud) {
    Index outer = 0;
    for (Index i = 0; i < cloud.size(); ++i) {
      Real ring = cloud.points.row(i).head(2).norm();
      if (ring > 2.0) ++outer;
    }
    return static_cast<Real>(outer) / static_cast<Real>(cloud.size());
  };
  Real param = outer_fraction(sample_torus(20000, 2.0, 1.0, 5, false));
  Real area = outer_fraction(sample_torus(20000, 2.0, 1.0, 5, true));
  CHECK(param == doctest::Approx(0.5).epsilon(0.03));
  CHECK(area == doctest::Approx(0.5 + 1.0 / (kPi * 2.0)).epsilon(0.03));
}
