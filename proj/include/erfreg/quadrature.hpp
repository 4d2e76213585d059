#pragma once

#include <vector>

#include <Eigen/Core>

#include "erfreg/geometry.hpp"

namespace erfreg {

// Symmetric rule on the reference triangle (0,0), (1,0), (0,1).
struct ReferenceRule {
  int degree = 0;
  std::vector<Eigen::Vector2d> nodes;  // (xi1, xi2); barycentrics (1-xi1-xi2, xi1, xi2)
  std::vector<double> weights;         // sum to 1/2
};

ReferenceRule reference_rule(int q);

struct CompositeQuadrature {
  Surface surface;
  int q = 0;
  double h = 0.0;
  Eigen::Matrix3Xd points;
  Eigen::Matrix3Xd normals;
  Eigen::VectorXd weights;  // reference weight times chart jacobian
  std::vector<int> element_of;

  Eigen::Index size() const { return weights.size(); }
};

CompositeQuadrature build_composite(const SurfaceMesh& mesh, int q);

}  // namespace erfreg
