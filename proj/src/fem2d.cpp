#include "cmsbudget/fem2d.hpp"

#include <cmath>
#include <limits>

#include "cmsbudget/errors.hpp"

namespace cmsbudget {

void Material::validate() const {
  if (!(youngs_modulus > 0.0)) throw Error("material: E must be positive");
  if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5)) {
    throw Error("material: nu must be in [0, 0.5)");
  }
  if (!(density > 0.0)) throw Error("material: density must be positive");
  if (!(thickness > 0.0)) throw Error("material: thickness must be positive");
}

double Mesh2D::element_area(size_t e) const {
  const auto& el = elements[e];
  const Eigen::Vector2d& a = nodes[static_cast<size_t>(el[0])];
  const Eigen::Vector2d& b = nodes[static_cast<size_t>(el[1])];
  const Eigen::Vector2d& c = nodes[static_cast<size_t>(el[2])];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

void Mesh2D::validate() const {
  if (order != 1 && order != 2) throw Error("mesh order must be 1 or 2");
  const int npe = nodes_per_element();
  for (size_t e = 0; e < elements.size(); ++e) {
    for (int k = 0; k < npe; ++k) {
      const int idx = elements[e][static_cast<size_t>(k)];
      if (idx < 0 || static_cast<size_t>(idx) >= nodes.size()) {
        throw Error("mesh element node index out of range");
      }
    }
    const double area = element_area(e);
    if (!(area > 0.0)) throw DegenerateElement(static_cast<long>(e), area);
    if (order == 2) {
      // mid-side nodes must sit at the edge midpoints
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2d mid =
            0.5 * (nodes[static_cast<size_t>(elements[e][static_cast<size_t>(k)])] +
                   nodes[static_cast<size_t>(elements[e][static_cast<size_t>((k + 1) % 3)])]);
        const Eigen::Vector2d& ms = nodes[static_cast<size_t>(elements[e][static_cast<size_t>(3 + k)])];
        if ((mid - ms).norm() > 1e-9 * (1.0 + mid.norm())) {
          throw Error("quadratic mid-side node not at edge midpoint");
        }
      }
    }
  }
}

Mesh2D mesh_rectangle(double width, double height, int nx, int ny, int order) {
  if (!(width > 0.0) || !(height > 0.0) || nx < 1 || ny < 1) {
    throw Error("mesh_rectangle: bad dimensions");
  }
  if (order != 1 && order != 2) throw Error("mesh_rectangle: order must be 1 or 2");
  Mesh2D mesh;
  mesh.order = order;
  const int s = order;  // fine-grid subdivisions per cell edge
  const int gx = s * nx + 1;
  const int gy = s * ny + 1;
  mesh.nodes.reserve(static_cast<size_t>(gx) * static_cast<size_t>(gy));
  for (int j = 0; j < gy; ++j) {
    for (int i = 0; i < gx; ++i) {
      mesh.nodes.emplace_back(width * i / (s * nx), height * j / (s * ny));
    }
  }
  auto node = [&](int i, int j) { return j * gx + i; };
  for (int cj = 0; cj < ny; ++cj) {
    for (int ci = 0; ci < nx; ++ci) {
      const int i0 = s * ci;
      const int j0 = s * cj;
      if (order == 1) {
        mesh.elements.push_back({node(i0, j0), node(i0 + 1, j0), node(i0, j0 + 1), 0, 0, 0});
        mesh.elements.push_back(
            {node(i0 + 1, j0), node(i0 + 1, j0 + 1), node(i0, j0 + 1), 0, 0, 0});
      } else {
        mesh.elements.push_back({node(i0, j0), node(i0 + 2, j0), node(i0, j0 + 2),
                                 node(i0 + 1, j0), node(i0 + 1, j0 + 1), node(i0, j0 + 1)});
        mesh.elements.push_back({node(i0 + 2, j0), node(i0 + 2, j0 + 2), node(i0, j0 + 2),
                                 node(i0 + 2, j0 + 1), node(i0 + 1, j0 + 2),
                                 node(i0 + 1, j0 + 1)});
      }
    }
  }
  mesh.validate();
  return mesh;
}

Mesh2D mesh_right_triangle(double base, double height, int n, int order) {
  if (!(base > 0.0) || !(height > 0.0) || n < 1) {
    throw Error("mesh_right_triangle: bad dimensions");
  }
  if (order != 1 && order != 2) throw Error("mesh_right_triangle: order must be 1 or 2");
  Mesh2D mesh;
  mesh.order = order;
  const int s = order;
  const int g = s * n;  // fine-grid rows satisfy i + j <= g
  std::vector<std::vector<int>> id(static_cast<size_t>(g + 1),
                                   std::vector<int>(static_cast<size_t>(g + 1), -1));
  for (int j = 0; j <= g; ++j) {
    for (int i = 0; i + j <= g; ++i) {
      id[static_cast<size_t>(i)][static_cast<size_t>(j)] = static_cast<int>(mesh.nodes.size());
      mesh.nodes.emplace_back(base * i / g, height * j / g);
    }
  }
  auto node = [&](int i, int j) { return id[static_cast<size_t>(i)][static_cast<size_t>(j)]; };
  for (int cj = 0; cj < n; ++cj) {
    for (int ci = 0; ci + cj < n; ++ci) {
      const int i0 = s * ci;
      const int j0 = s * cj;
      if (order == 1) {
        mesh.elements.push_back({node(i0, j0), node(i0 + 1, j0), node(i0, j0 + 1), 0, 0, 0});
        if (ci + cj < n - 1) {
          mesh.elements.push_back(
              {node(i0 + 1, j0), node(i0 + 1, j0 + 1), node(i0, j0 + 1), 0, 0, 0});
        }
      } else {
        mesh.elements.push_back({node(i0, j0), node(i0 + 2, j0), node(i0, j0 + 2),
                                 node(i0 + 1, j0), node(i0 + 1, j0 + 1), node(i0, j0 + 1)});
        if (ci + cj < n - 1) {
          mesh.elements.push_back({node(i0 + 2, j0), node(i0 + 2, j0 + 2), node(i0, j0 + 2),
                                   node(i0 + 2, j0 + 1), node(i0 + 1, j0 + 2),
                                   node(i0 + 1, j0 + 1)});
        }
      }
    }
  }
  mesh.validate();
  return mesh;
}

Mesh2D translate(Mesh2D mesh, const Eigen::Vector2d& offset) {
  for (auto& p : mesh.nodes) p += offset;
  return mesh;
}

namespace {

// Dunavant quadrature on the reference triangle, weights normalized to sum 1.
struct QuadPoint {
  double l1, l2, w;
};

// degree-2 rule, exact for the T6 stiffness integrand on straight triangles
constexpr std::array<QuadPoint, 3> kTriDegree2 = {{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0},
    {1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
}};

// degree-4 rule for the T6 consistent mass (quartic integrand)
constexpr std::array<QuadPoint, 6> kTriDegree4 = {{
    {0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.109951743655322},
}};

// T6 shape functions and derivatives in area coordinates (L3 = 1 - L1 - L2)
void t6_shape(double l1, double l2, Eigen::Matrix<double, 6, 1>& n,
              Eigen::Matrix<double, 6, 2>& dn) {
  const double l3 = 1.0 - l1 - l2;
  n << l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0), l3 * (2.0 * l3 - 1.0), 4.0 * l1 * l2,
      4.0 * l2 * l3, 4.0 * l3 * l1;
  // d/dL1, d/dL2 with L3 eliminated
  dn << 4.0 * l1 - 1.0, 0.0,
        0.0, 4.0 * l2 - 1.0,
        -(4.0 * l3 - 1.0), -(4.0 * l3 - 1.0),
        4.0 * l2, 4.0 * l1,
        -4.0 * l2, 4.0 * (l3 - l2),
        4.0 * (l3 - l1), -4.0 * l1;
}

Eigen::Matrix3d plane_stress_matrix(const Material& mat) {
  const double e = mat.youngs_modulus;
  const double nu = mat.poisson_ratio;
  Eigen::Matrix3d d;
  d << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, (1.0 - nu) / 2.0;
  return (e / (1.0 - nu * nu)) * d;
}

}  // namespace

SecondOrderModel assemble_plane_stress(const Mesh2D& mesh, const Material& material) {
  mesh.validate();
  material.validate();
  const Eigen::Index n_nodes = static_cast<Eigen::Index>(mesh.nodes.size());
  const Eigen::Index n = 2 * n_nodes;
  const Eigen::Matrix3d d_mat = plane_stress_matrix(material);
  const double t = material.thickness;
  const double rho = material.density;

  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);

  const int npe = mesh.nodes_per_element();
  const int ndof = 2 * npe;

  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    const double area = mesh.element_area(e);
    if (!(area > 0.0)) throw DegenerateElement(static_cast<long>(e), area);

    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(ndof, ndof);
    Eigen::MatrixXd me = Eigen::MatrixXd::Zero(ndof, ndof);

    const Eigen::Vector2d& p1 = mesh.nodes[static_cast<size_t>(el[0])];
    const Eigen::Vector2d& p2 = mesh.nodes[static_cast<size_t>(el[1])];
    const Eigen::Vector2d& p3 = mesh.nodes[static_cast<size_t>(el[2])];

    if (mesh.order == 1) {
      // constant-strain triangle, closed form
      const double b1 = p2.y() - p3.y(), b2 = p3.y() - p1.y(), b3 = p1.y() - p2.y();
      const double c1 = p3.x() - p2.x(), c2 = p1.x() - p3.x(), c3 = p2.x() - p1.x();
      Eigen::Matrix<double, 3, 6> b;
      b << b1, 0, b2, 0, b3, 0,
           0, c1, 0, c2, 0, c3,
           c1, b1, c2, b2, c3, b3;
      b /= (2.0 * area);
      ke = t * area * b.transpose() * d_mat * b;
      Eigen::Matrix3d pattern;
      pattern << 2, 1, 1, 1, 2, 1, 1, 1, 2;
      const double scale = rho * t * area / 12.0;
      for (int a = 0; a < 3; ++a) {
        for (int bnode = 0; bnode < 3; ++bnode) {
          me(2 * a, 2 * bnode) += scale * pattern(a, bnode);
          me(2 * a + 1, 2 * bnode + 1) += scale * pattern(a, bnode);
        }
      }
    } else {
      // straight-sided T6: affine map, constant Jacobian
      Eigen::Matrix2d jac;
      jac.col(0) = p1 - p3;  // dx/dL1
      jac.col(1) = p2 - p3;  // dx/dL2
      const double det = jac.determinant();
      if (!(det > 0.0)) throw DegenerateElement(static_cast<long>(e), 0.5 * det);
      const Eigen::Matrix2d jinv = jac.inverse();

      Eigen::Matrix<double, 6, 1> nfun;
      Eigen::Matrix<double, 6, 2> dn;
      for (const QuadPoint& q : kTriDegree2) {
        t6_shape(q.l1, q.l2, nfun, dn);
        const Eigen::Matrix<double, 6, 2> dndx = dn * jinv;
        Eigen::Matrix<double, 3, 12> b = Eigen::Matrix<double, 3, 12>::Zero();
        for (int a = 0; a < 6; ++a) {
          b(0, 2 * a) = dndx(a, 0);
          b(1, 2 * a + 1) = dndx(a, 1);
          b(2, 2 * a) = dndx(a, 1);
          b(2, 2 * a + 1) = dndx(a, 0);
        }
        ke += (t * area * q.w) * b.transpose() * d_mat * b;
      }
      for (const QuadPoint& q : kTriDegree4) {
        t6_shape(q.l1, q.l2, nfun, dn);
        Eigen::Matrix<double, 2, 12> nm = Eigen::Matrix<double, 2, 12>::Zero();
        for (int a = 0; a < 6; ++a) {
          nm(0, 2 * a) = nfun(a);
          nm(1, 2 * a + 1) = nfun(a);
        }
        me += (rho * t * area * q.w) * nm.transpose() * nm;
      }
    }

    for (int a = 0; a < npe; ++a) {
      for (int bnode = 0; bnode < npe; ++bnode) {
        const Eigen::Index ga = 2 * static_cast<Eigen::Index>(el[static_cast<size_t>(a)]);
        const Eigen::Index gb = 2 * static_cast<Eigen::Index>(el[static_cast<size_t>(bnode)]);
        stiffness.block<2, 2>(ga, gb) += ke.block<2, 2>(2 * a, 2 * bnode);
        mass.block<2, 2>(ga, gb) += me.block<2, 2>(2 * a, 2 * bnode);
      }
    }
  }

  SecondOrderModel model;
  model.mass = 0.5 * (mass + mass.transpose());
  model.stiffness = 0.5 * (stiffness + stiffness.transpose());
  model.damping = Eigen::MatrixXd::Zero(n, n);
  model.input_map = Eigen::MatrixXd::Zero(n, 0);
  model.output_map = Eigen::MatrixXd::Zero(0, n);
  model.dof_labels.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    model.dof_labels.push_back("n" + std::to_string(i) + ".ux");
    model.dof_labels.push_back("n" + std::to_string(i) + ".uy");
  }
  return model;
}

SecondOrderModel apply_dirichlet(const SecondOrderModel& model,
                                 const std::vector<Eigen::Index>& fixed_dofs) {
  const Eigen::Index n = model.dof_count();
  std::vector<char> fixed(static_cast<size_t>(n), 0);
  for (Eigen::Index i : fixed_dofs) {
    if (i < 0 || i >= n) throw Error("apply_dirichlet: DOF index out of range");
    fixed[static_cast<size_t>(i)] = 1;
  }
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!fixed[static_cast<size_t>(i)]) keep.push_back(i);
  }
  const Eigen::Index nk = static_cast<Eigen::Index>(keep.size());
  SecondOrderModel out;
  out.mass.resize(nk, nk);
  out.damping.resize(nk, nk);
  out.stiffness.resize(nk, nk);
  out.input_map.resize(nk, model.input_count());
  out.output_map.resize(model.output_count(), nk);
  for (Eigen::Index r = 0; r < nk; ++r) {
    for (Eigen::Index c = 0; c < nk; ++c) {
      out.mass(r, c) = model.mass(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
      out.damping(r, c) = model.damping(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
      out.stiffness(r, c) =
          model.stiffness(keep[static_cast<size_t>(r)], keep[static_cast<size_t>(c)]);
    }
    out.input_map.row(r) = model.input_map.row(keep[static_cast<size_t>(r)]);
    out.output_map.col(r) = model.output_map.col(keep[static_cast<size_t>(r)]);
  }
  if (!model.dof_labels.empty()) {
    out.dof_labels.reserve(static_cast<size_t>(nk));
    for (Eigen::Index i : keep) out.dof_labels.push_back(model.dof_labels[static_cast<size_t>(i)]);
  }
  return out;
}

std::vector<int> nodes_in_box(const Mesh2D& mesh, const Eigen::Vector2d& lo,
                              const Eigen::Vector2d& hi) {
  std::vector<int> out;
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    const Eigen::Vector2d& p = mesh.nodes[i];
    if (p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y()) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

int nearest_node(const Mesh2D& mesh, const Eigen::Vector2d& point) {
  if (mesh.nodes.empty()) throw Error("nearest_node: empty mesh");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double d = (mesh.nodes[i] - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace cmsbudget
