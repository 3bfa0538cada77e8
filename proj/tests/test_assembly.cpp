#include "doctest.h"

#include <random>

#include "cmsbudget/assembly.hpp"
#include "cmsbudget/errors.hpp"
#include "cmsbudget/model.hpp"

using namespace cmsbudget;

namespace {

SecondOrderModel scalar_mass_spring(double m, double k, double c = 0.05) {
  SecondOrderModel model;
  model.mass = Eigen::MatrixXd::Constant(1, 1, m);
  model.damping = Eigen::MatrixXd::Constant(1, 1, c);
  model.stiffness = Eigen::MatrixXd::Constant(1, 1, k);
  model.input_map = Eigen::MatrixXd::Identity(1, 1);
  model.output_map = Eigen::MatrixXd::Identity(1, 1);
  return model;
}

AssemblyModel two_scalar_assembly(double coupling_spring) {
  AssemblyModel assembly;
  assembly.components.push_back(
      {"a", scalar_mass_spring(1.0, 2.0), DofPartition::from_boundary(1, {0})});
  assembly.components.push_back(
      {"b", scalar_mass_spring(1.5, 3.0), DofPartition::from_boundary(1, {0})});
  Interconnection& c = assembly.coupling;
  c.signature = {{"a", 1, 1}, {"b", 1, 1}};
  c.k_bb.resize(2, 2);
  c.k_bb << -coupling_spring, coupling_spring, coupling_spring, -coupling_spring;
  c.k_bc = Eigen::MatrixXd::Zero(2, 1);
  c.k_bc(0, 0) = 1.0;  // external force on component a
  c.k_cb = Eigen::MatrixXd::Zero(1, 2);
  c.k_cb(0, 1) = 1.0;  // output = displacement of component b
  assembly.grid = FrequencyGrid::linear_rad(2.5, 12);
  return assembly;
}

}  // namespace

TEST_CASE("coupled_frf passthrough with no feedback") {
  AssemblyModel assembly;
  assembly.components.push_back(
      {"a", scalar_mass_spring(1.0, 2.0), DofPartition::from_boundary(1, {0})});
  Interconnection& c = assembly.coupling;
  c.signature = {{"a", 1, 1}};
  c.k_bb = Eigen::MatrixXd::Zero(1, 1);
  c.k_bc = Eigen::MatrixXd::Identity(1, 1);
  c.k_cb = Eigen::MatrixXd::Identity(1, 1);
  assembly.grid = FrequencyGrid::linear_rad(2.0, 8);
  const FrfSamples h_c = coupled_frf(assembly);
  const FrfSamples h = frf_direct(assembly.components[0].model, assembly.grid);
  for (size_t i = 0; i < h.values.size(); ++i) {
    CHECK((h_c.values[i] - h.values[i]).norm() == 0.0);
  }
}

TEST_CASE("two coupled scalars match the monolithic model") {
  const AssemblyModel assembly = two_scalar_assembly(1.0);
  const SecondOrderModel mono = monolithic_assemble(assembly);
  // hand-assembled stiffness with the coupling spring
  Eigen::MatrixXd k_expected(2, 2);
  k_expected << 2.0 + 1.0, -1.0, -1.0, 3.0 + 1.0;
  CHECK((mono.stiffness - k_expected).norm() < 1e-14);

  const FrfSamples via_coupling = coupled_frf(assembly);
  const FrfSamples via_mono = frf_direct(mono, assembly.grid);
  for (size_t i = 0; i < via_mono.values.size(); ++i) {
    CHECK(relative_error(via_coupling.values[i], via_mono.values[i]) < 1e-8);
  }
}

TEST_CASE("monolithic stiffness without coupling is block diagonal") {
  const AssemblyModel assembly = two_scalar_assembly(0.0);
  const SecondOrderModel mono = monolithic_assemble(assembly);
  Eigen::MatrixXd expected(2, 2);
  expected << 2.0, 0.0, 0.0, 3.0;
  CHECK((mono.stiffness - expected).norm() == 0.0);
}

TEST_CASE("monolithic assembly warns about asymmetric coupling") {
  AssemblyModel assembly = two_scalar_assembly(1.0);
  assembly.coupling.k_bb(0, 1) = 0.5;  // break the spring symmetry
  std::vector<std::string> warnings;
  monolithic_assemble(assembly, [&](const std::string& w) { warnings.push_back(w); });
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("asymmetric") != std::string::npos);
}

TEST_CASE("interconnection transfer matrix") {
  const AssemblyModel assembly = two_scalar_assembly(0.8);
  std::vector<FrfSamples> frfs;
  for (const auto& comp : assembly.components) {
    frfs.push_back(frf_direct(comp.model, assembly.grid));
  }
  const FrfSamples n = interconnection_transfer(assembly.coupling, frfs);

  SUBCASE("no feedback leaves only the routing blocks") {
    AssemblyModel open = two_scalar_assembly(0.0);
    const FrfSamples n0 = interconnection_transfer(open.coupling, frfs);
    for (const auto& v : n0.values) {
      CHECK(v.topLeftCorner(2, 2).norm() == 0.0);
      CHECK((v.topRightCorner(2, 1).real() - open.coupling.k_bc).norm() < 1e-15);
      CHECK((v.bottomLeftCorner(1, 2).real() - open.coupling.k_cb).norm() < 1e-15);
    }
  }
  SUBCASE("push-through identity holds at every grid point") {
    for (size_t i = 0; i < n.values.size(); ++i) {
      const Eigen::MatrixXcd h_b = [&] {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
        h(0, 0) = frfs[0].values[i](0, 0);
        h(1, 1) = frfs[1].values[i](0, 0);
        return h;
      }();
      const Eigen::MatrixXcd kbb = assembly.coupling.k_bb.cast<Complex>();
      const Eigen::MatrixXcd lhs =
          kbb * (Eigen::MatrixXcd::Identity(2, 2) - h_b * kbb).inverse();
      const Eigen::MatrixXcd rhs =
          (Eigen::MatrixXcd::Identity(2, 2) - kbb * h_b).inverse() * kbb;
      CHECK((lhs - rhs).norm() < 1e-10 * lhs.norm());
      // and the N block equals it
      CHECK((n.values[i].topLeftCorner(2, 2) - lhs).norm() < 1e-10 * lhs.norm());
    }
  }
  SUBCASE("bottom-right block is exactly zero") {
    for (const auto& v : n.values) {
      CHECK(v.bottomRightCorner(1, 1).norm() == 0.0);
    }
  }
}

TEST_CASE("assembly_error pointwise difference and grid mismatch") {
  const AssemblyModel assembly = two_scalar_assembly(1.0);
  const FrfSamples h = coupled_frf(assembly);
  FrfSamples shifted = h;
  for (auto& v : shifted.values) v.array() += Complex(0.1, 0.0);
  const ErrorSamples e = assembly_error(h, shifted);
  for (const auto& v : e.values) {
    CHECK(std::abs(v(0, 0) - Complex(0.1, 0.0)) < 1e-15);
  }
  const ErrorSamples zero = assembly_error(h, h);
  for (const auto& v : zero.values) CHECK(v.norm() == 0.0);

  FrfSamples other = h;
  other.grid = FrequencyGrid::linear_rad(2.5, 11);
  other.values.pop_back();
  CHECK_THROWS_AS(assembly_error(h, other), GridMismatch);
}

TEST_CASE("randomized assemblies: coupled FRF equals the monolithic oracle") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> comp_count(2, 3);
  std::uniform_int_distribution<int> dof_count(2, 8);

  for (int trial = 0; trial < 5; ++trial) {
    AssemblyModel assembly;
    const int k = comp_count(rng);
    Eigen::Index m_b = 0;
    for (int j = 0; j < k; ++j) {
      const Eigen::Index n = dof_count(rng);
      SecondOrderModel model;
      model.mass = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) model.mass(i, i) = 0.5 + unit(rng);
      model.stiffness = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double kk = 0.5 + 2.0 * unit(rng);
        model.stiffness(i, i) += kk;
        model.stiffness(i + 1, i + 1) += kk;
        model.stiffness(i, i + 1) -= kk;
        model.stiffness(i + 1, i) -= kk;
      }
      model.stiffness(0, 0) += 1.0 + unit(rng);  // ground
      model.damping = Eigen::MatrixXd::Zero(n, n);
      model = apply_modal_damping(model, 0.02);
      // two collocated channels on the last two DOF
      model.input_map = Eigen::MatrixXd::Zero(n, 2);
      model.input_map(n - 1, 0) = 1.0;
      model.input_map(n - 2, 1) = 1.0;
      model.output_map = model.input_map.transpose();
      assembly.components.push_back(
          {"c" + std::to_string(j), model, DofPartition::from_boundary(n, {n - 2, n - 1})});
      assembly.coupling.signature.push_back({"c" + std::to_string(j), 2, 2});
      m_b += 2;
    }
    assembly.coupling.k_bb = Eigen::MatrixXd::Zero(m_b, m_b);
    // random springs between channel pairs of distinct components
    for (int s = 0; s < k; ++s) {
      const Eigen::Index ca = 2 * (s % k) + (unit(rng) < 0.5 ? 0 : 1);
      const Eigen::Index cb = 2 * ((s + 1) % k) + (unit(rng) < 0.5 ? 0 : 1);
      const double kk = 0.3 + unit(rng);
      assembly.coupling.k_bb(ca, ca) -= kk;
      assembly.coupling.k_bb(ca, cb) += kk;
      assembly.coupling.k_bb(cb, ca) += kk;
      assembly.coupling.k_bb(cb, cb) -= kk;
    }
    assembly.coupling.k_bc = Eigen::MatrixXd::Zero(m_b, 1);
    assembly.coupling.k_bc(0, 0) = 1.0;
    assembly.coupling.k_cb = Eigen::MatrixXd::Zero(1, m_b);
    assembly.coupling.k_cb(0, m_b - 1) = 1.0;
    assembly.grid = FrequencyGrid::linear_rad(2.0, 10);

    const FrfSamples h_c = coupled_frf(assembly);
    const FrfSamples mono = frf_direct(monolithic_assemble(assembly), assembly.grid);
    for (size_t i = 0; i < mono.values.size(); ++i) {
      CHECK(relative_error(h_c.values[i], mono.values[i]) < 1e-8);
    }
  }
}
