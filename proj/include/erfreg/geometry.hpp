#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace erfreg {

enum class SurfaceKind { Sphere, Torus, Bean };

std::string to_string(SurfaceKind kind);
SurfaceKind parse_surface_kind(const std::string& name);

struct Surface {
  SurfaceKind kind = SurfaceKind::Sphere;
  double radius = 1.0;  // sphere
  double major = 1.0;   // torus R
  double minor = 0.5;   // torus r
  bool is_sphere() const { return kind == SurfaceKind::Sphere; }
};

// sphere: {r}; torus: {R, r}; bean: {} (fixed deformation).
Surface make_surface(SurfaceKind kind, const std::vector<double>& params = {});

// Radial graph of the bean over the unit sphere.
double bean_radius(const Eigen::Vector3d& unit);

// Analytic point and outward normal for sphere/bean directions (unit vector)
// or torus parameters (u, v, 0).
struct SurfacePoint {
  Eigen::Vector3d position;
  Eigen::Vector3d normal;
};
SurfacePoint surface_point(const Surface& surface, const Eigen::Vector3d& param);

// True iff x lies in the bounded region enclosed by the surface.
bool is_interior(const Surface& surface, const Eigen::Vector3d& x);

// Curved triangle. Sphere/bean: corners are unit vectors and the chart is
// x = rho(n) n with n = normalize(sum lambda_i corner_i). Torus: corners are
// (u, v, 0) parameter points, mapped affinely then through the torus chart.
struct Element {
  std::array<Eigen::Vector3d, 3> corners;
  double diameter = 0.0;
};

struct SurfaceMesh {
  Surface surface;
  std::vector<Element> elements;
  double h = 0.0;
  int level = 0;  // icosahedral frequency or torus v-divisions
};

inline constexpr std::size_t kMaxElements = 400000;

SurfaceMesh mesh_surface(const Surface& surface, double target_h);
// Mesh at an explicit refinement level (icosahedral frequency / torus rings).
SurfaceMesh mesh_surface_level(const Surface& surface, int level);

struct ChartValue {
  Eigen::Vector3d position;
  Eigen::Vector3d normal;
  double jacobian;
};

// ref = (xi1, xi2) in the reference triangle; barycentrics (1-xi1-xi2, xi1, xi2).
ChartValue chart_eval(const Surface& surface, const Element& element, const Eigen::Vector2d& ref);

// Plain-text OFF listing of element corners and triangles.
void write_off(const SurfaceMesh& mesh, const std::string& path);

}  // namespace erfreg
