#include "erfreg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace erfreg {

namespace {

// Adds the three permutations of barycentric (a, a, 1-2a).
void add_orbit(ReferenceRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.nodes.emplace_back(a, a);
  r.nodes.emplace_back(b, a);
  r.nodes.emplace_back(a, b);
  r.weights.insert(r.weights.end(), 3, w);
}

}  // namespace

ReferenceRule reference_rule(int q) {
  ReferenceRule r;
  r.degree = q;
  switch (q) {
    case 2:
      add_orbit(r, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 4:
      add_orbit(r, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312 / 2.0);
      add_orbit(r, 0.09157621350977074345957146340220, 0.10995174365532186763832632490021 / 2.0);
      break;
    case 5: {
      const double s15 = std::sqrt(15.0);
      r.nodes.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      r.weights.push_back(9.0 / 80.0);
      add_orbit(r, (6.0 - s15) / 21.0, (155.0 - s15) / 2400.0);
      add_orbit(r, (6.0 + s15) / 21.0, (155.0 + s15) / 2400.0);
      break;
    }
    default:
      throw std::invalid_argument("unsupported quadrature degree " + std::to_string(q));
  }
  return r;
}

CompositeQuadrature build_composite(const SurfaceMesh& mesh, int q) {
  const ReferenceRule rule = reference_rule(q);
  const Eigen::Index per = static_cast<Eigen::Index>(rule.nodes.size());
  const Eigen::Index n = per * static_cast<Eigen::Index>(mesh.elements.size());
  CompositeQuadrature out;
  out.surface = mesh.surface;
  out.q = q;
  out.h = mesh.h;
  out.points.resize(3, n);
  out.normals.resize(3, n);
  out.weights.resize(n);
  out.element_of.resize(n);
  Eigen::Index idx = 0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    for (Eigen::Index i = 0; i < per; ++i, ++idx) {
      const ChartValue c = chart_eval(mesh.surface, mesh.elements[e], rule.nodes[i]);
      out.points.col(idx) = c.position;
      out.normals.col(idx) = c.normal;
      out.weights[idx] = rule.weights[i] * c.jacobian;
      out.element_of[idx] = static_cast<int>(e);
    }
  }
  return out;
}

}  // namespace erfreg
