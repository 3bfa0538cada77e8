#include "doctest.h"

#include <cmath>

#include "cmsbudget/errors.hpp"
#include "cmsbudget/fem2d.hpp"
#include "cmsbudget/linalg.hpp"

using namespace cmsbudget;

namespace {

const Material kSteel{210.0e9, 0.3, 7800.0, 0.05};

double shoelace_area_sum(const Mesh2D& mesh) {
  double total = 0.0;
  for (size_t e = 0; e < mesh.elements.size(); ++e) total += mesh.element_area(e);
  return total;
}

// count of eigenvalues below the relative zero threshold
int zero_eig_count(const Eigen::MatrixXd& k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  int count = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) < 1e-8 * scale) ++count;
  }
  return count;
}

std::vector<Eigen::Index> dofs_of_nodes(const std::vector<int>& nodes) {
  std::vector<Eigen::Index> dofs;
  for (int n : nodes) {
    dofs.push_back(2 * n);
    dofs.push_back(2 * n + 1);
  }
  return dofs;
}

}  // namespace

TEST_CASE("mesh_rectangle counts") {
  const Mesh2D coarse = mesh_rectangle(1.0, 1.0, 1, 1, 1);
  CHECK(coarse.elements.size() == 2);
  CHECK(coarse.nodes.size() == 4);
  const Mesh2D quad = mesh_rectangle(2.0, 1.0, 2, 1, 2);
  CHECK(quad.elements.size() == 4);
  CHECK(quad.nodes.size() == 15);
}

TEST_CASE("mesh_rectangle area equals width * height") {
  for (int order : {1, 2}) {
    const Mesh2D mesh = mesh_rectangle(1.7, 0.4, 5, 3, order);
    CHECK(shoelace_area_sum(mesh) == doctest::Approx(1.7 * 0.4).epsilon(1e-12));
  }
}

TEST_CASE("mesh_right_triangle counts and area") {
  const Mesh2D t1 = mesh_right_triangle(1.0, 1.0, 1, 1);
  CHECK(t1.elements.size() == 1);
  CHECK(t1.nodes.size() == 3);
  const Mesh2D t2 = mesh_right_triangle(1.0, 1.0, 2, 1);
  CHECK(t2.elements.size() == 4);
  CHECK(t2.nodes.size() == 6);
  for (int order : {1, 2}) {
    const Mesh2D mesh = mesh_right_triangle(0.5, 0.3, 4, order);
    CHECK(mesh.elements.size() == 16);
    CHECK(shoelace_area_sum(mesh) == doctest::Approx(0.5 * 0.3 / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("free-free rectangle has exactly three rigid modes") {
  for (int order : {1, 2}) {
    const Mesh2D mesh = mesh_rectangle(0.6, 0.2, 4, 2, order);
    const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
    CHECK(is_symmetric(model.stiffness));
    CHECK(is_symmetric(model.mass));
    CHECK_NOTHROW(model.validate());  // mass PD, stiffness PSD
    CHECK(zero_eig_count(model.stiffness) == 3);
  }
}

TEST_CASE("total mass matches the analytic value") {
  const Mesh2D mesh = mesh_rectangle(0.8, 0.3, 3, 2, 2);
  const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
  Eigen::VectorXd ones_x = Eigen::VectorXd::Zero(model.dof_count());
  for (Eigen::Index i = 0; i < model.dof_count(); i += 2) ones_x(i) = 1.0;
  const double expected = kSteel.density * 0.8 * 0.3 * kSteel.thickness;
  CHECK(ones_x.dot(model.mass * ones_x) == doctest::Approx(expected).epsilon(1e-9));

  const Mesh2D tri = mesh_right_triangle(0.5, 0.3, 3, 2);
  const SecondOrderModel tri_model = assemble_plane_stress(tri, kSteel);
  Eigen::VectorXd ones_y = Eigen::VectorXd::Zero(tri_model.dof_count());
  for (Eigen::Index i = 1; i < tri_model.dof_count(); i += 2) ones_y(i) = 1.0;
  const double tri_expected = kSteel.density * 0.5 * 0.3 / 2.0 * kSteel.thickness;
  CHECK(ones_y.dot(tri_model.mass * ones_y) == doctest::Approx(tri_expected).epsilon(1e-9));
}

TEST_CASE("patch test: linear field gives constant strain and zero internal residual") {
  // displacement u = [a1 + b1 x + c1 y, a2 + b2 x + c2 y]
  const double a1 = 0.1e-3, b1 = 2.0e-3, c1 = -0.5e-3;
  const double a2 = -0.2e-3, b2 = 0.7e-3, c2 = 1.1e-3;
  auto field = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d(a1 + b1 * p.x() + c1 * p.y(), a2 + b2 * p.x() + c2 * p.y());
  };

  SUBCASE("2-element order-1 mesh reproduces constant strain energy") {
    const Mesh2D mesh = mesh_rectangle(1.0, 1.0, 1, 1, 1);
    const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
    Eigen::VectorXd u(model.dof_count());
    for (size_t i = 0; i < mesh.nodes.size(); ++i) {
      u.segment<2>(2 * static_cast<Eigen::Index>(i)) = field(mesh.nodes[i]);
    }
    // closed-form strain energy of the constant-strain state over the domain
    const double ex = b1, ey = c2, gxy = c1 + b2;
    Eigen::Vector3d strain(ex, ey, gxy);
    Eigen::Matrix3d d;
    d << 1.0, kSteel.poisson_ratio, 0.0, kSteel.poisson_ratio, 1.0, 0.0, 0.0, 0.0,
        (1.0 - kSteel.poisson_ratio) / 2.0;
    d *= kSteel.youngs_modulus / (1.0 - kSteel.poisson_ratio * kSteel.poisson_ratio);
    const double energy_expected = 0.5 * kSteel.thickness * 1.0 * strain.dot(d * strain);
    const double energy_fe = 0.5 * u.dot(model.stiffness * u);
    CHECK(energy_fe == doctest::Approx(energy_expected).epsilon(1e-12));
  }

  SUBCASE("internal residual vanishes on a mesh with interior nodes") {
    for (int order : {1, 2}) {
      const Mesh2D mesh = mesh_rectangle(1.0, 1.0, 2, 2, order);
      const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
      Eigen::VectorXd u(model.dof_count());
      for (size_t i = 0; i < mesh.nodes.size(); ++i) {
        u.segment<2>(2 * static_cast<Eigen::Index>(i)) = field(mesh.nodes[i]);
      }
      const Eigen::VectorXd residual = model.stiffness * u;
      const double scale = model.stiffness.cwiseAbs().maxCoeff() * u.cwiseAbs().maxCoeff();
      for (size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Eigen::Vector2d& p = mesh.nodes[i];
        const bool interior = p.x() > 1e-9 && p.x() < 1.0 - 1e-9 && p.y() > 1e-9 &&
                              p.y() < 1.0 - 1e-9;
        if (interior) {
          CHECK(std::abs(residual(2 * static_cast<Eigen::Index>(i))) <= 1e-9 * scale);
          CHECK(std::abs(residual(2 * static_cast<Eigen::Index>(i) + 1)) <= 1e-9 * scale);
        }
      }
    }
  }
}

TEST_CASE("apply_dirichlet") {
  const Mesh2D mesh = mesh_rectangle(0.6, 0.2, 3, 1, 1);
  const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
  SUBCASE("fixing everything leaves an empty model") {
    std::vector<Eigen::Index> all;
    for (Eigen::Index i = 0; i < model.dof_count(); ++i) all.push_back(i);
    const SecondOrderModel empty = apply_dirichlet(model, all);
    CHECK(empty.dof_count() == 0);
  }
  SUBCASE("three well-chosen constraints remove all rigid modes") {
    // ux, uy at the origin node plus uy at the far corner of the bottom edge
    const int n0 = nearest_node(mesh, {0.0, 0.0});
    const int n1 = nearest_node(mesh, {0.6, 0.0});
    const SecondOrderModel fixed =
        apply_dirichlet(model, {2 * n0, 2 * n0 + 1, 2 * n1 + 1});
    CHECK(zero_eig_count(fixed.stiffness) == 0);
  }
}

TEST_CASE("cantilever tip deflection approaches beam theory") {
  // strip 1.0 x 0.1, fixed at x = 0, vertical tip load: delta = 4 F L^3 / (E b h^3)
  const double length = 1.0, height = 0.1;
  const Mesh2D mesh = mesh_rectangle(length, height, 40, 4, 2);
  const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
  const std::vector<int> clamped = nodes_in_box(mesh, {-1e-9, -1e-9}, {1e-9, height + 1e-9});
  const SecondOrderModel fixed = apply_dirichlet(model, dofs_of_nodes(clamped));

  // map original DOF -> constrained index to place the load and read deflection
  std::vector<Eigen::Index> map(static_cast<size_t>(model.dof_count()), -1);
  {
    std::vector<char> is_fixed(static_cast<size_t>(model.dof_count()), 0);
    for (Eigen::Index d : dofs_of_nodes(clamped)) is_fixed[static_cast<size_t>(d)] = 1;
    Eigen::Index next = 0;
    for (Eigen::Index d = 0; d < model.dof_count(); ++d) {
      if (!is_fixed[static_cast<size_t>(d)]) map[static_cast<size_t>(d)] = next++;
    }
  }
  const int tip = nearest_node(mesh, {length, height / 2.0});
  const double load = 1000.0;  // N
  Eigen::VectorXd f = Eigen::VectorXd::Zero(fixed.dof_count());
  f(map[static_cast<size_t>(2 * tip + 1)]) = load;
  const Eigen::VectorXd u = fixed.stiffness.ldlt().solve(f);
  const double tip_deflection = u(map[static_cast<size_t>(2 * tip + 1)]);
  const double beam = 4.0 * load * std::pow(length, 3) /
                      (kSteel.youngs_modulus * kSteel.thickness * std::pow(height, 3));
  CHECK(std::abs(tip_deflection - beam) / beam < 0.05);
}

TEST_CASE("refinement changes the first constrained eigenfrequencies by < 5%") {
  auto first_frequencies = [&](int nx, int ny, int order) {
    const Mesh2D mesh = mesh_rectangle(0.5, 0.125, nx, ny, order);
    const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
    const std::vector<int> left = nodes_in_box(mesh, {-1e-9, -1e-9}, {1e-9, 0.2});
    const std::vector<int> right = nodes_in_box(mesh, {0.5 - 1e-9, -1e-9}, {0.5 + 1e-9, 0.2});
    std::vector<Eigen::Index> dofs = dofs_of_nodes(left);
    const std::vector<Eigen::Index> rd = dofs_of_nodes(right);
    dofs.insert(dofs.end(), rd.begin(), rd.end());
    const SecondOrderModel fixed = apply_dirichlet(model, dofs);
    const ModalSolution sol = solve_free_modes(fixed.stiffness, fixed.mass);
    return sol.omegas.head(5).eval();
  };
  const Eigen::VectorXd coarse = first_frequencies(8, 2, 2);
  const Eigen::VectorXd fine = first_frequencies(16, 4, 2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(std::abs(coarse(i) - fine(i)) / fine(i) < 0.05);
  }

  // order-2 elements are softer than order-1 on the same geometry
  const Eigen::VectorXd linear = first_frequencies(8, 2, 1);
  const Eigen::VectorXd quadratic = first_frequencies(8, 2, 2);
  CHECK(quadratic(0) <= linear(0));
}

TEST_CASE("order-2 softer than order-1 on the demo geometry classes") {
  auto first_free_elastic = [&](const Mesh2D& mesh) {
    const SecondOrderModel model = assemble_plane_stress(mesh, kSteel);
    const ModalSolution sol = solve_free_modes(model.stiffness, model.mass);
    return sol.omegas(sol.rigid_count);  // first elastic frequency
  };
  // rectangle (frame class)
  CHECK(first_free_elastic(mesh_rectangle(1.0, 0.25, 8, 2, 2)) <=
        first_free_elastic(mesh_rectangle(1.0, 0.25, 8, 2, 1)));
  // right triangle (stage class)
  CHECK(first_free_elastic(mesh_right_triangle(0.36, 0.216, 4, 2)) <=
        first_free_elastic(mesh_right_triangle(0.36, 0.216, 4, 1)));
}

TEST_CASE("material and mesh validation") {
  const Material bad_e{-1.0, 0.3, 7800.0, 0.05};
  const Material bad_nu{210e9, 0.5, 7800.0, 0.05};
  const Material bad_rho{210e9, 0.3, 0.0, 0.05};
  CHECK_THROWS_AS(bad_e.validate(), Error);
  CHECK_THROWS_AS(bad_nu.validate(), Error);
  CHECK_THROWS_AS(bad_rho.validate(), Error);
  Mesh2D bad = mesh_rectangle(1.0, 1.0, 1, 1, 1);
  std::swap(bad.elements[0][0], bad.elements[0][1]);  // clockwise corners
  CHECK_THROWS_AS(bad.validate(), DegenerateElement);
}
