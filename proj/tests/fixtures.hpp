#pragma once

#include <random>
#include <string>

#include "cmsbudget/assembly.hpp"
#include "cmsbudget/model.hpp"

namespace cmsbudget::testfx {

/// Grounded mass-spring chain with `channels` collocated force/displacement
/// channels on the top DOF, 2% modal damping.
inline SecondOrderModel chain_component(std::mt19937_64& rng, Eigen::Index n,
                                        Eigen::Index channels, bool grounded = true) {
  std::uniform_real_distribution<double> mass_dist(0.5, 2.0);
  std::uniform_real_distribution<double> spring_dist(0.5, 3.0);
  SecondOrderModel model;
  model.mass = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) model.mass(i, i) = mass_dist(rng);
  model.stiffness = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double k = spring_dist(rng);
    model.stiffness(i, i) += k;
    model.stiffness(i + 1, i + 1) += k;
    model.stiffness(i, i + 1) -= k;
    model.stiffness(i + 1, i) -= k;
  }
  if (grounded) model.stiffness(0, 0) += spring_dist(rng);
  model.damping = Eigen::MatrixXd::Zero(n, n);
  model = apply_modal_damping(model, 0.02);
  model.input_map = Eigen::MatrixXd::Zero(n, channels);
  model.output_map = Eigen::MatrixXd::Zero(channels, n);
  for (Eigen::Index c = 0; c < channels; ++c) {
    model.input_map(n - 1 - c, c) = 1.0;
    model.output_map(c, n - 1 - c) = 1.0;
  }
  return model;
}

/// Two chain components coupled by one spring, one external input on the
/// first component and one output on the second.
inline AssemblyModel two_chain_assembly(uint64_t seed, Eigen::Index n1 = 4,
                                        Eigen::Index n2 = 5, double coupling_k = 1.0,
                                        int grid_points = 12, double omega_max = 2.0) {
  std::mt19937_64 rng(seed);
  AssemblyModel assembly;
  SecondOrderModel a = chain_component(rng, n1, 2);
  SecondOrderModel b = chain_component(rng, n2, 2);
  assembly.components.push_back(
      {"a", a, DofPartition::from_boundary(n1, {n1 - 2, n1 - 1})});
  assembly.components.push_back(
      {"b", b, DofPartition::from_boundary(n2, {n2 - 2, n2 - 1})});
  Interconnection& c = assembly.coupling;
  c.signature = {{"a", 2, 2}, {"b", 2, 2}};
  c.k_bb = Eigen::MatrixXd::Zero(4, 4);
  // spring between channel 0 of a and channel 0 of b
  c.k_bb(0, 0) -= coupling_k;
  c.k_bb(0, 2) += coupling_k;
  c.k_bb(2, 0) += coupling_k;
  c.k_bb(2, 2) -= coupling_k;
  c.k_bc = Eigen::MatrixXd::Zero(4, 1);
  c.k_bc(1, 0) = 1.0;  // external force on channel 1 of a
  c.k_cb = Eigen::MatrixXd::Zero(1, 4);
  c.k_cb(0, 3) = 1.0;  // output: channel 1 of b
  assembly.grid = FrequencyGrid::linear_rad(omega_max, grid_points);
  return assembly;
}

}  // namespace cmsbudget::testfx
