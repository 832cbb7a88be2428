#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gidm/kernel.hpp"

namespace gidm {

enum class Shape { Torus, Sphere };

struct DatasetSpec {
  Shape shape = Shape::Torus;
  Index n_points = 2000;
  Real major_radius = 2.0;  // torus R
  Real minor_radius = 1.0;  // torus r
  bool area_uniform = false;
  GroupSpec group = so2();  // acting group recorded on the cloud
  std::uint64_t seed = 0;
  std::vector<InjectedCopy> injected;
};

std::string shape_name(Shape s);
Shape shape_from_name(const std::string& name);

/// Torus point for explicit parameter angles; azimuth is the coordinate the
/// rotation action shifts, tube is the angle around the small circle.
Vector torus_point(Real azimuth, Real tube, Real R, Real r);

/// N torus samples, uniform in the parameter angles by default; the
/// area-uniform variant rejection-samples the tube angle by its surface
/// density. The z-axis rotation action is recorded on the cloud.
PointCloud sample_torus(Index n, Real R, Real r, std::uint64_t seed,
                        bool area_uniform = false);

/// N samples uniform on the unit sphere (normalized Gaussians).
PointCloud sample_sphere(Index n, std::uint64_t seed);

/// Appends act(beta, x_i) and records the copy so downstream tests can key
/// off the registry.
PointCloud inject_copy(PointCloud cloud, Index i, Real beta);

PointCloud make_cloud(const DatasetSpec& spec);

}  // namespace gidm
