#include "gidm/data.hpp"

#include <cmath>
#include <stdexcept>

#include "gidm/rng.hpp"

namespace gidm {

std::string shape_name(Shape s) {
  return s == Shape::Torus ? "torus" : "sphere";
}

Shape shape_from_name(const std::string& name) {
  if (name == "torus") return Shape::Torus;
  if (name == "sphere") return Shape::Sphere;
  throw ConfigError("unknown shape: " + name);
}

Vector torus_point(Real azimuth, Real tube, Real R, Real r) {
  Vector p(3);
  Real ring = R + r * std::cos(tube);
  p[0] = ring * std::cos(azimuth);
  p[1] = ring * std::sin(azimuth);
  p[2] = r * std::sin(tube);
  return p;
}

PointCloud sample_torus(Index n, Real R, Real r, std::uint64_t seed,
                        bool area_uniform) {
  if (n < 1) throw std::invalid_argument("sample_torus: n < 1");
  if (!(R > r) || !(r > 0.0)) {
    throw std::invalid_argument("sample_torus: need R > r > 0");
  }
  RandomStream rng(seed);
  PointCloud cloud;
  cloud.points.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    Real azimuth = rng.uniform(0.0, kTwoPi);
    Real tube = rng.uniform(0.0, kTwoPi);
    if (area_uniform) {
      // Surface density over the tube angle is (R + r cos t) / (R + r).
      while (rng.uniform() > (R + r * std::cos(tube)) / (R + r)) {
        tube = rng.uniform(0.0, kTwoPi);
      }
    }
    cloud.points.row(i) = torus_point(azimuth, tube, R, r);
  }
  cloud.action = ActionSpec{so2(), 0, 1};
  cloud.source_label = area_uniform ? "torus-area" : "torus";
  cloud.seed = seed;
  cloud.metadata = {{"shape", "torus"},
                    {"n", std::to_string(n)},
                    {"major_radius", std::to_string(R)},
                    {"minor_radius", std::to_string(r)},
                    {"area_uniform", area_uniform ? "1" : "0"},
                    {"seed", std::to_string(seed)}};
  return cloud;
}

PointCloud sample_sphere(Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_sphere: n < 1");
  RandomStream rng(seed);
  PointCloud cloud;
  cloud.points.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    Vector g(3);
    do {
      g[0] = rng.gaussian();
      g[1] = rng.gaussian();
      g[2] = rng.gaussian();
    } while (g.norm() == 0.0);
    cloud.points.row(i) = g / g.norm();
  }
  cloud.action = ActionSpec{so2(), 0, 1};
  cloud.source_label = "sphere";
  cloud.seed = seed;
  cloud.metadata = {{"shape", "sphere"},
                    {"n", std::to_string(n)},
                    {"seed", std::to_string(seed)}};
  return cloud;
}

PointCloud inject_copy(PointCloud cloud, Index i, Real beta) {
  if (i < 0 || i >= cloud.size()) {
    throw std::out_of_range("inject_copy: source index out of range");
  }
  GroupElement g = cloud.action.group.id == GroupId::SO2
                       ? so2_element(beta)
                       : cyclic_element(
                             cloud.action.group.order,
                             static_cast<long>(std::llround(
                                 beta * cloud.action.group.order / kTwoPi)));
  Vector copy = act(g, cloud.points.row(i), cloud.action);
  cloud.points.conservativeResize(cloud.size() + 1, Eigen::NoChange);
  cloud.points.row(cloud.size() - 1) = copy;
  cloud.injected.push_back({i, g.as_angle()});
  return cloud;
}

PointCloud make_cloud(const DatasetSpec& spec) {
  PointCloud cloud =
      spec.shape == Shape::Torus
          ? sample_torus(spec.n_points, spec.major_radius, spec.minor_radius,
                         spec.seed, spec.area_uniform)
          : sample_sphere(spec.n_points, spec.seed);
  cloud.action.group = spec.group;
  for (const auto& copy : spec.injected) {
    cloud = inject_copy(std::move(cloud), copy.source, copy.angle);
  }
  return cloud;
}

}  // namespace gidm
