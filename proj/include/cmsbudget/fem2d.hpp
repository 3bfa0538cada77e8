#pragma once

#include <array>
#include <vector>

#include "cmsbudget/model.hpp"

namespace cmsbudget {

struct Material {
  double youngs_modulus;  // Pa
  double poisson_ratio;
  double density;    // kg/m^3
  double thickness;  // m

  void validate() const;
};

/// Triangulated 2D domain. Elements store 3 (order 1) or 6 (order 2) node
/// indices, counter-clockwise corners first, then mid-sides (12, 23, 31).
struct Mesh2D {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 6>> elements;
  int order = 1;

  int nodes_per_element() const { return order == 1 ? 3 : 6; }
  /// Signed area from the corner nodes.
  double element_area(size_t e) const;
  void validate() const;
};

/// Structured triangulation of [0,w]x[0,h] with 2*nx*ny triangles.
Mesh2D mesh_rectangle(double width, double height, int nx, int ny, int order);

/// Structured triangulation of the right triangle with legs on the axes,
/// n^2 triangles.
Mesh2D mesh_right_triangle(double base, double height, int n, int order);

/// Rigid placement of a mesh in assembly coordinates.
Mesh2D translate(Mesh2D mesh, const Eigen::Vector2d& offset);

/// Assembles consistent-mass plane-stress matrices, 2 DOF per node (ux, uy).
/// The returned model has no inputs/outputs and zero damping.
SecondOrderModel assemble_plane_stress(const Mesh2D& mesh, const Material& material);

/// Removes the given DOF rows/columns from all matrices and maps.
SecondOrderModel apply_dirichlet(const SecondOrderModel& model,
                                 const std::vector<Eigen::Index>& fixed_dofs);

/// Nodes whose coordinates fall inside [lo, hi] (inclusive).
std::vector<int> nodes_in_box(const Mesh2D& mesh, const Eigen::Vector2d& lo,
                              const Eigen::Vector2d& hi);

/// Index of the node closest to a point.
int nearest_node(const Mesh2D& mesh, const Eigen::Vector2d& point);

}  // namespace cmsbudget
