#include "erfreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Geometry>

#include "erfreg/errors.hpp"
#include "erfreg/special_functions.hpp"

namespace erfreg {

using Eigen::Vector3d;

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::Torus: return "torus";
    case SurfaceKind::Bean: return "bean";
  }
  return "?";
}

SurfaceKind parse_surface_kind(const std::string& name) {
  if (name == "sphere") return SurfaceKind::Sphere;
  if (name == "torus") return SurfaceKind::Torus;
  if (name == "bean") return SurfaceKind::Bean;
  throw std::invalid_argument("unknown surface '" + name + "'");
}

Surface make_surface(SurfaceKind kind, const std::vector<double>& params) {
  Surface s;
  s.kind = kind;
  switch (kind) {
    case SurfaceKind::Sphere:
      if (params.size() > 1) throw std::invalid_argument("sphere takes one radius");
      if (!params.empty()) s.radius = params[0];
      if (!(s.radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
      break;
    case SurfaceKind::Torus:
      if (params.size() == 2) {
        s.major = params[0];
        s.minor = params[1];
      } else if (!params.empty()) {
        throw std::invalid_argument("torus takes (R, r)");
      }
      if (!(s.minor > 0.0) || !(s.major > s.minor)) throw std::invalid_argument("torus needs R > r > 0");
      break;
    case SurfaceKind::Bean:
      if (!params.empty()) throw std::invalid_argument("bean takes no parameters");
      break;
  }
  return s;
}

double bean_radius(const Vector3d& n) { return 1.0 + 0.3 * n.x() * n.z() + 0.15 * n.y() * n.y(); }

namespace {

Vector3d bean_gradient(const Vector3d& n) { return Vector3d(0.3 * n.z(), 0.3 * n.y(), 0.3 * n.x()); }

Vector3d torus_point(const Surface& s, double u, double v) {
  const double w = s.major + s.minor * std::cos(v);
  return Vector3d(w * std::cos(u), w * std::sin(u), s.minor * std::sin(v));
}

Vector3d torus_normal(double u, double v) {
  return Vector3d(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
}

struct Tangents {
  Vector3d x, d1, d2;
};

// Position and parametric derivatives with respect to (xi1, xi2).
Tangents chart_tangents(const Surface& s, const Element& e, const Eigen::Vector2d& ref) {
  const Vector3d& c0 = e.corners[0];
  const Vector3d e1 = e.corners[1] - c0;
  const Vector3d e2 = e.corners[2] - c0;
  const Vector3d p = c0 + ref.x() * e1 + ref.y() * e2;
  Tangents t;
  if (s.kind == SurfaceKind::Torus) {
    const double u = p.x(), v = p.y();
    const double w = s.major + s.minor * std::cos(v);
    const Vector3d du(-w * std::sin(u), w * std::cos(u), 0.0);
    const Vector3d dv(-s.minor * std::sin(v) * std::cos(u), -s.minor * std::sin(v) * std::sin(u),
                      s.minor * std::cos(v));
    t.x = torus_point(s, u, v);
    t.d1 = e1.x() * du + e1.y() * dv;
    t.d2 = e2.x() * du + e2.y() * dv;
    return t;
  }
  const double len = p.norm();
  const Vector3d n = p / len;
  auto dn = [&](const Vector3d& dp) { return (dp - n * n.dot(dp)) / len; };
  const Vector3d dn1 = dn(e1), dn2 = dn(e2);
  if (s.kind == SurfaceKind::Sphere) {
    t.x = s.radius * n;
    t.d1 = s.radius * dn1;
    t.d2 = s.radius * dn2;
  } else {
    const double rho = bean_radius(n);
    const Vector3d g = bean_gradient(n);
    t.x = rho * n;
    t.d1 = g.dot(dn1) * n + rho * dn1;
    t.d2 = g.dot(dn2) * n + rho * dn2;
  }
  return t;
}

double measure_diameter(const Surface& s, const Element& e) {
  // Sample the boundary; adequate for the mildly curved elements used here.
  constexpr int kPerEdge = 6;
  std::vector<Vector3d> pts;
  const std::array<Eigen::Vector2d, 3> verts = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector2d& p0 = verts[a];
    const Eigen::Vector2d& p1 = verts[(a + 1) % 3];
    for (int i = 0; i < kPerEdge; ++i)
      pts.push_back(chart_tangents(s, e, p0 + (p1 - p0) * (double(i) / kPerEdge)).x);
  }
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

std::vector<Element> icosahedral_elements(int freq) {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vector3d> v = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& x : v) x.normalize();
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  std::vector<Element> out;
  out.reserve(20 * freq * freq);
  for (const auto& f : faces) {
    const Vector3d& A = v[f[0]];
    const bool outward = (v[f[1]] - A).cross(v[f[2]] - A).dot(A) > 0.0;
    const Vector3d& B = outward ? v[f[1]] : v[f[2]];
    const Vector3d& C = outward ? v[f[2]] : v[f[1]];
    auto grid = [&](int i, int j) {
      return Vector3d(A + (B - A) * (double(i) / freq) + (C - A) * (double(j) / freq)).normalized();
    };
    for (int j = 0; j < freq; ++j) {
      for (int i = 0; i + j < freq; ++i) {
        out.push_back({{grid(i, j), grid(i + 1, j), grid(i, j + 1)}, 0.0});
        if (i + j + 1 < freq) out.push_back({{grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)}, 0.0});
      }
    }
  }
  return out;
}

// Periodic grid, 2 nv divisions around the central circle and nv around the
// tube; each cell split into two right triangles (parameter angles 26.6,
// 63.4 and 90 degrees).
std::vector<Element> torus_elements(int nv) {
  const int nu = 2 * nv;
  const double du = 2.0 * kPi / nu, dv = 2.0 * kPi / nv;
  std::vector<Element> out;
  out.reserve(2 * nu * nv);
  for (int a = 0; a < nu; ++a) {
    for (int b = 0; b < nv; ++b) {
      const Vector3d p00(a * du, b * dv, 0), p10((a + 1) * du, b * dv, 0);
      const Vector3d p01(a * du, (b + 1) * dv, 0), p11((a + 1) * du, (b + 1) * dv, 0);
      out.push_back({{p00, p10, p11}, 0.0});
      out.push_back({{p00, p11, p01}, 0.0});
    }
  }
  return out;
}

double initial_level_guess(const Surface& s, double target_h) {
  switch (s.kind) {
    case SurfaceKind::Sphere: return 1.32 * s.radius / target_h;
    case SurfaceKind::Bean: return 1.6 / target_h;
    case SurfaceKind::Torus: return 2.0 * kPi * s.minor * 1.2 / target_h;
  }
  return 1.0;
}

}  // namespace

SurfacePoint surface_point(const Surface& s, const Vector3d& param) {
  switch (s.kind) {
    case SurfaceKind::Sphere: {
      const Vector3d n = param.normalized();
      return {s.radius * n, n};
    }
    case SurfaceKind::Torus:
      return {torus_point(s, param.x(), param.y()), torus_normal(param.x(), param.y())};
    case SurfaceKind::Bean: {
      const Vector3d n = param.normalized();
      const double rho = bean_radius(n);
      const Vector3d g = bean_gradient(n);
      // Gradient of |x| - rho(x/|x|) at x = rho n.
      const Vector3d grad = n - (g - n * g.dot(n)) / rho;
      return {rho * n, grad.normalized()};
    }
  }
  return {};
}

bool is_interior(const Surface& s, const Vector3d& x) {
  switch (s.kind) {
    case SurfaceKind::Sphere: return x.norm() < s.radius;
    case SurfaceKind::Torus: {
      const double w = std::hypot(x.x(), x.y()) - s.major;
      return std::hypot(w, x.z()) < s.minor;
    }
    case SurfaceKind::Bean: {
      const double r = x.norm();
      return r == 0.0 || r < bean_radius(x / r);
    }
  }
  return false;
}

ChartValue chart_eval(const Surface& s, const Element& e, const Eigen::Vector2d& ref) {
  const Tangents t = chart_tangents(s, e, ref);
  const Vector3d c = t.d1.cross(t.d2);
  const double jac = c.norm();
  return {t.x, c / jac, jac};
}

SurfaceMesh mesh_surface_level(const Surface& s, int level) {
  if (level < 1) throw std::invalid_argument("mesh level must be >= 1");
  const std::size_t count = s.kind == SurfaceKind::Torus ? std::size_t(4) * level * level
                                                          : std::size_t(20) * level * level;
  if (count > kMaxElements) throw ResourceError("mesh exceeds element cap");
  SurfaceMesh mesh;
  mesh.surface = s;
  mesh.level = level;
  mesh.elements = s.kind == SurfaceKind::Torus ? torus_elements(level) : icosahedral_elements(level);
  for (auto& e : mesh.elements) {
    e.diameter = measure_diameter(s, e);
    mesh.h = std::max(mesh.h, e.diameter);
  }
  return mesh;
}

SurfaceMesh mesh_surface(const Surface& s, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  // Element diameters scale like 1/level; start just below the estimate
  // and walk upward until the measured h fits.
  int level = std::max(1, static_cast<int>(std::floor(0.9 * initial_level_guess(s, target_h))));
  for (;; ++level) {
    const std::size_t count = s.kind == SurfaceKind::Torus ? std::size_t(4) * level * level
                                                            : std::size_t(20) * level * level;
    if (count > kMaxElements) throw ResourceError("mesh for target h exceeds element cap");
    SurfaceMesh mesh = mesh_surface_level(s, level);
    if (mesh.h <= target_h) return mesh;
  }
}

void write_off(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "OFF\n" << 3 * mesh.elements.size() << ' ' << mesh.elements.size() << " 0\n";
  const std::array<Eigen::Vector2d, 3> verts = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  for (const auto& e : mesh.elements)
    for (const auto& r : verts) {
      const Vector3d x = chart_eval(mesh.surface, e, r).position;
      out << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
    }
  for (std::size_t i = 0; i < mesh.elements.size(); ++i)
    out << "3 " << 3 * i << ' ' << 3 * i + 1 << ' ' << 3 * i + 2 << '\n';
}

}  // namespace erfreg
